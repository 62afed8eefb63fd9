import os
from logging import getLogger

from sqlalchemy import create_engine
from sqlalchemy.orm import declarative_base, sessionmaker

logger = getLogger(__name__)

DATABASE_URL = os.environ.get("DATABASE_URL", "sqlite:///data/sensornet.db")

Base = declarative_base()
SessionLocal = sessionmaker(autocommit=False, autoflush=False)

_engine = None


def get_engine(url: str | None = None):
    """エンジンを遅延生成して返します。

    インポート時にファイルを作らないよう、最初の呼び出しで作成します。
    sqlite のファイルパスの場合は親ディレクトリも作成します。
    """
    global _engine
    if url is not None:
        return create_engine(url)
    if _engine is None:
        if DATABASE_URL.startswith("sqlite:///"):
            db_dir = os.path.dirname(DATABASE_URL.removeprefix("sqlite:///"))
            if db_dir:
                os.makedirs(db_dir, exist_ok=True)
        logger.info(f"Creating database engine for {DATABASE_URL.split('@')[-1]}")
        _engine = create_engine(DATABASE_URL)
    return _engine


def init_db(engine=None):
    """テーブルを作成します (既存なら何もしません)。"""
    from .models import db_models  # noqa: F401  テーブル登録のため

    engine = engine or get_engine()
    Base.metadata.create_all(bind=engine)
    logger.info("Database tables created or already exist.")
    return engine


def get_db(engine=None):
    """
    データベースセッションを提供するジェネレータ。
    開始時にセッションを作成し、終了時にクローズします。
    """
    db = SessionLocal(bind=engine or get_engine())
    try:
        yield db
    finally:
        db.close()
