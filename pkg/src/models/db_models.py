from sqlalchemy import JSON, Column, DateTime, Float, ForeignKey, Integer, String
from sqlalchemy.orm import relationship
from sqlalchemy.sql import func

from ..database import Base


class ExperimentRun(Base):
    """
    モンテカルロ実験 (saturation / single_parameter) の実行単位を記録するモデル。
    """
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True, index=True)
    created_at = Column(DateTime(timezone=True), server_default=func.now(), index=True)
    kind = Column(String, index=True, nullable=False)
    parameters_used = Column(JSON)
    n_nodes = Column(Integer, nullable=False)
    mu = Column(Integer, nullable=False)
    trials = Column(Integer, nullable=False)
    empirical_trace = Column(Float)
    bound_trace = Column(Float)
    ratio = Column(Float)

    trials_results = relationship("TrialResult", back_populates="run", cascade="all, delete-orphan")


class TrialResult(Base):
    """
    試行ごとの推定値と二乗誤差。
    """
    __tablename__ = "trial_results"

    id = Column(Integer, primary_key=True, index=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False, index=True)
    trial_index = Column(Integer, nullable=False)
    seed = Column(Integer, nullable=False)
    estimates = Column(JSON)
    squared_error = Column(Float)

    run = relationship("ExperimentRun", back_populates="trials_results")
