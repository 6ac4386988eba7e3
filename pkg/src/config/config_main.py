from dotenv import load_dotenv
import os

load_dotenv()

class SamplingConfig():
    """Quasirandom sequence defaults."""
    alpha0: float = float(os.getenv("SEPPROB_ALPHA0", "0.5"))
    index_offset: int = int(os.getenv("SEPPROB_INDEX_OFFSET", "0"))

sampling_config = SamplingConfig()

class EstimationConfig():
    block_size: int = int(os.getenv("SEPPROB_BLOCK_SIZE", "2000000"))
    chunk_size: int = int(os.getenv("SEPPROB_CHUNK_SIZE", "65536"))
    workers: int = int(os.getenv("SEPPROB_WORKERS", "1"))
    bins: int = int(os.getenv("SEPPROB_BINS", "10"))
    shift_margin: float = float(os.getenv("SEPPROB_SHIFT_MARGIN", "300"))
    ppt_atol: float = float(os.getenv("SEPPROB_PPT_ATOL", "1e-15"))
    output_dir: str = os.getenv("SEPPROB_OUTPUT_DIR", "results")

    # Paired-run recipe: one trace per alpha0
    paired_alpha0 = (0.25, 0.75)

estimation_config = EstimationConfig()

class QuadratureConfig():
    epsabs: float = float(os.getenv("SEPPROB_QUAD_EPSABS", "1e-12"))
    epsrel: float = float(os.getenv("SEPPROB_QUAD_EPSREL", "1e-10"))
    limit: int = int(os.getenv("SEPPROB_QUAD_LIMIT", "200"))
    series_max_terms: int = int(os.getenv("SEPPROB_SERIES_MAX_TERMS", "100000"))

quadrature_config = QuadratureConfig()

class LoggingConfig():
    level: str = os.getenv("SEPPROB_LOG_LEVEL", "INFO").upper()
    format: str = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

logging_config = LoggingConfig()
