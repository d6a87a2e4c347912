from sqlalchemy import create_engine
from sqlalchemy.orm import DeclarativeBase, sessionmaker

from config import DATABASE_URL

engine = create_engine(DATABASE_URL, echo=False)
SessionLocal = sessionmaker(engine, expire_on_commit=False)


class Base(DeclarativeBase):
    pass


def configure(url: str) -> None:
    """Point the run ledger at another database (tests use in-memory SQLite)."""
    global engine, SessionLocal
    engine = create_engine(url, echo=False)
    SessionLocal = sessionmaker(engine, expire_on_commit=False)


def init_db() -> None:
    import models  # noqa: F401

    Base.metadata.create_all(engine)
