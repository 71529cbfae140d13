"""configuration for the vkramer runner."""
import os
import sys


class Config:
    """runner configuration loaded from the environment."""

    def __init__(self):
        # output settings
        self.out_dir = os.getenv("VKRAMER_OUT", "reports")
        self.out_from_env = "VKRAMER_OUT" in os.environ

        # randomized vectors
        self.seed = int(os.getenv("VKRAMER_SEED", "0"))
        self.dimension = int(os.getenv("VKRAMER_DIM", "8"))

        # numerical tolerances
        self.rank_tol = float(os.getenv("RANK_TOL", "1e-10"))
        self.membership_tol = float(os.getenv("MEMBERSHIP_TOL", "1e-8"))
        self.cond_limit = float(os.getenv("COND_LIMIT", "1e12"))

        # wall-clock columns break byte-identical reruns, so they are opt-in
        self.record_timings = self._get_bool("RECORD_TIMINGS", False)

        # logging settings
        self.log_level = os.getenv("LOG_LEVEL", "INFO").upper()

    def _get_bool(self, key, default):
        """get boolean from env."""
        value = os.getenv(key, str(default)).lower()
        return value in ["true", "1", "yes"]

    @property
    def quiet(self):
        return self.log_level in ["ERROR", "CRITICAL"]

    def __repr__(self):
        return (f"Config(out_dir={self.out_dir}, seed={self.seed}, d={self.dimension}, "
                f"rank_tol={self.rank_tol}, membership_tol={self.membership_tol}, "
                f"timings={self.record_timings})")


def load_config():
    """load and validate configuration from environment."""
    config = Config()

    if config.dimension < 1:
        print(f"warning: VKRAMER_DIM={config.dimension} is not positive, using 8", file=sys.stderr)
        config.dimension = 8

    if not 0 < config.rank_tol < 1:
        print(f"warning: RANK_TOL={config.rank_tol} out of range, using 1e-10", file=sys.stderr)
        config.rank_tol = 1e-10

    if not 0 < config.membership_tol < 1:
        print(f"warning: MEMBERSHIP_TOL={config.membership_tol} out of range, using 1e-8",
              file=sys.stderr)
        config.membership_tol = 1e-8

    if config.cond_limit <= 1:
        print(f"warning: COND_LIMIT={config.cond_limit} too small, using 1e12", file=sys.stderr)
        config.cond_limit = 1e12

    if config.seed < 0:
        print("warning: negative VKRAMER_SEED, using 0", file=sys.stderr)
        config.seed = 0

    return config
