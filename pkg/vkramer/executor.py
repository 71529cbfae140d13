"""battery execution with timing and error capture."""
from dataclasses import dataclass, field
import time

from .errors import CertificationFailure, ScenarioError

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_CERTIFICATION = 3
EXIT_BATTERY = 4


@dataclass
class BatteryResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    error: Exception = None
    runtime_ms: float = 0.0

    @property
    def exit_code(self):
        if self.passed:
            return EXIT_OK
        if isinstance(self.error, ScenarioError):
            return EXIT_SCHEMA
        if isinstance(self.error, CertificationFailure):
            return EXIT_CERTIFICATION
        return EXIT_BATTERY


class Executor:
    """runs batteries; library errors become failed results instead of crashes."""

    def __init__(self, config):
        self.config = config
        self.record_timings = getattr(config, "record_timings", False)

    def execute(self, name, battery, *args, **kwargs):
        """run battery(*args, **kwargs), which returns (passed, details)."""
        started = time.perf_counter()
        try:
            passed, details = battery(*args, **kwargs)
            result = BatteryResult(name, bool(passed), details)
        except Exception as e:
            result = BatteryResult(name, False, {}, e)

        if self.record_timings:
            result.runtime_ms = (time.perf_counter() - started) * 1e3
        return result
