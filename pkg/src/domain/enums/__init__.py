from .distribution_kind import DistributionKind
from .sample_construction import SampleConstruction
from .job_command import JobCommand
