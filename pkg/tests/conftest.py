import math

import numpy as np
import pytest
from sqlalchemy import create_engine
from sqlalchemy.pool import StaticPool

from src import database
from src.database import SessionLocal, init_db
from src.models.network import CaseId, NetworkConfig, PhaseSet


@pytest.fixture
def case1_config():
    return NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0,
        couplings=(1.0, 1.0, 1.0), drivings=(0.5, 0.2, 0.1),
    )


@pytest.fixture
def case2_config():
    return NetworkConfig(
        n_nodes=3, lambda_=1.0, lambda_prime=0.0,
        couplings=(1.0, 0.8, 0.6), drivings=(0.0, 0.0, 0.0),
    )


@pytest.fixture
def oracle_config():
    return NetworkConfig(
        n_nodes=2, lambda_=1.0, lambda_prime=0.0,
        couplings=(0.1, 0.2), drivings=(0.05, 0.0), alpha=1.0,
    )


@pytest.fixture
def equal_beta_phases():
    beta = 4.0 * math.pi
    return PhaseSet(case_id=CaseId.CASE1, betas=(beta, beta), phis=(0.3, 0.4))


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(20240601))


@pytest.fixture
def engine(monkeypatch):
    engine = create_engine("sqlite://", connect_args={"check_same_thread": False}, poolclass=StaticPool)
    init_db(engine)
    monkeypatch.setattr(database, "_engine", engine)
    return engine


@pytest.fixture
def db(engine):
    session = SessionLocal(bind=engine)
    try:
        yield session
    finally:
        session.close()


@pytest.fixture
def write_config(tmp_path):
    def _write(text: str, name: str = "network.cfg"):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return path
    return _write
