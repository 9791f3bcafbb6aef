from pathlib import Path

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings and configuration"""

    model_config = SettingsConfigDict(env_prefix="ADELIC_", env_file=".env", extra="ignore")

    # Application
    app_name: str = "Adelic Desk"
    app_version: str = "1.0.0"
    debug: bool = False

    # Paths
    base_dir: Path = Path(__file__).resolve().parent.parent.parent
    data_dir: Path = base_dir / "data"
    problems_dir: Path = data_dir / "problems"
    reports_dir: Path = data_dir / "reports"

    # Parallelism (ADELIC_THREADS)
    threads: int = 4

    # Boundary quadrature on Nevanlinna curves
    nodes: int = 4096
    clearance: float = 1e-8
    tolerance: float = 1e-8

    # Root finding
    root_tolerance: float = 1e-12
    root_max_iterations: int = 500

    # Slope enumeration
    enum_bound: int = 3
    enum_max_dim: int = 6
    enum_max_candidates: int = 500_000
    slope_tolerance: float = 1e-9

    # Reports
    float_digits: int = 15


settings = Settings()
