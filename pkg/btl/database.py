from sqlalchemy import create_engine, Column, String, Text, DateTime, Float, Integer, JSON, func
from sqlalchemy.orm import sessionmaker, declarative_base

from btl.config import BTL_DATABASE_URL

engine = None
SessionLocal = None
Base = declarative_base()


class RunLog(Base):
    __tablename__ = "RunLogs"

    id = Column(Text, primary_key=True)
    timestamp = Column(DateTime, nullable=False, server_default=func.current_timestamp())

    # Run info
    command = Column(String(20), nullable=False)
    domainKind = Column(String(20), nullable=True)
    deltas = Column(Text, nullable=True)
    level = Column(Integer, nullable=True)

    # Outcome
    exitCode = Column(Integer, nullable=False)
    report = Column(JSON, nullable=True)
    error = Column(Text, nullable=True)

    # Timing
    processingTimeMs = Column(Float, nullable=True)
    build = Column(String(64), nullable=True)


def init_db(url: str = None):
    """Initialize database connection and create tables."""
    global engine, SessionLocal

    url = url or BTL_DATABASE_URL
    if not url:
        raise ValueError("BTL_DATABASE_URL environment variable is not set")

    engine = create_engine(url, pool_pre_ping=True)
    SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)

    Base.metadata.create_all(bind=engine)


def get_db_session():
    """Get a database session directly (non-generator)."""
    if SessionLocal is None:
        init_db()
    return SessionLocal()
