import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv

from src.core.logger import logger

load_dotenv()


def get_config() -> Dict[str, Any]:
    """Get analysis limits and defaults from environment variables."""
    return {
        "log_level": os.getenv("CPG2KIT_LOG_LEVEL", "WARNING"),
        "max_configs": int(os.getenv("CPG2KIT_MAX_CONFIGS", "20000")),
        "sim_horizon": int(os.getenv("CPG2KIT_SIM_HORIZON", "12")),
        "default_bound": int(os.getenv("CPG2KIT_DEFAULT_BOUND", "16")),
        "default_threshold": int(os.getenv("CPG2KIT_DEFAULT_THRESHOLD", "1")),
        "npt_max_length": int(os.getenv("CPG2KIT_NPT_MAX_LENGTH", "8")),
        "rate_limit": os.getenv("CPG2KIT_RATE_LIMIT", "30/minute"),
    }


def create_services(config: Optional[Dict[str, Any]] = None):
    """Create the analysis service shared by the CLI and the HTTP API."""
    from src.services.analysis_service import AnalysisService

    logger.info("Creating services...")
    config = config or get_config()

    if config["max_configs"] <= 0:
        logger.error("CPG2KIT_MAX_CONFIGS must be positive")
        raise ValueError("CPG2KIT_MAX_CONFIGS must be a positive integer")
    if config["sim_horizon"] <= 0:
        logger.error("CPG2KIT_SIM_HORIZON must be positive")
        raise ValueError("CPG2KIT_SIM_HORIZON must be a positive integer")

    service = AnalysisService(
        max_configs=config["max_configs"],
        sim_horizon=config["sim_horizon"],
        default_bound=config["default_bound"],
        default_threshold=config["default_threshold"],
        npt_max_length=config["npt_max_length"],
    )
    logger.info(
        f"Analysis service initialized (max_configs={config['max_configs']}, "
        f"sim_horizon={config['sim_horizon']})"
    )
    return service
