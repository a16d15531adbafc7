from .config import STAGE_CONFIG_KEYS, ProjectConfig, ProviderConfig, stage_config_hash
from .project import STAGES, Project, StageState
from .stages import add_alignment, add_corpus, export_records, run_all, run_stage

__all__ = [
    "Project",
    "ProjectConfig",
    "ProviderConfig",
    "STAGES",
    "STAGE_CONFIG_KEYS",
    "StageState",
    "add_alignment",
    "add_corpus",
    "export_records",
    "run_all",
    "run_stage",
    "stage_config_hash",
]
