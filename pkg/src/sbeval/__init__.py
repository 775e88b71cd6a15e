"""Evaluation pipeline for LLM-generated Science Birds character structures."""

from .core import (
    BlockType,
    DropCall,
    EvaluationConfig,
    GridConfig,
    Level,
    PlacedBlock,
    block_dimensions,
    occupied_columns,
)
from .extraction import ExtractionResult, ExtractionStatus, extract, extract_last_fenced_block, parse_drop_calls
from .levelgen import SettleOutcome, StabilityReport, assess_stability, build, settle
from .metrics import (
    aggregate_and_rank,
    character_score,
    character_weights,
    cosine_distance,
    diversity,
    similarity,
    trial_score,
)
from .raster import Bitmap, decode_pgm, encode_pgm, rasterize
from .xml_codec import XmlMappingConfig, level_to_xml, xml_to_level

__version__ = "0.1.0"
