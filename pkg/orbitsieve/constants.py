from dataclasses import dataclass
from fractions import Fraction


@dataclass
class Constants:

    CACHE_SCHEMA_VERSION = 1
    ARTIFACT_SCHEMA_VERSION = 1
    ENV_PREFIX = "ORBIT_SIEVE_"

    DEFAULT_PRESENTATION = "hecke4"
    DEFAULT_BETA = 4
    DEFAULT_HEIGHT = 10_000
    DEFAULT_PRIME_BOUND = 50
    DEFAULT_WORD_CAP = 8
    DEFAULT_NODE_CAP = 5_000_000
    DEFAULT_ELEMENT_BUDGET = 10_000_000
    DEFAULT_R_LIST = (1, 2, 3, 4)
    DEFAULT_THETA = "gamburd"

    # Entries must stay strictly inside the signed 128-bit range.
    INT128_LIMIT = 1 << 127

    # Bitmap closure for mod-q BFS is used while q**4 fits this many bytes.
    BITMAP_LIMIT = 1 << 24

    EULER_GAMMA = 0.5772156649015328606
    # Root of (c/e)**c = e.
    SIEVE_C_CONST = 3.5911214766686221

    GAP_PRESETS = {
        "gamburd": Fraction(5, 6),
        "kim_sarnak": Fraction(39, 64),
        "selberg_conj": Fraction(1, 2),
    }

    # Files written to the output directory.
    ORBIT_ARTIFACT = "orbit.json"
    DENSITY_CSV = "density.csv"
    DENSITY_ARTIFACT = "density.json"
    SIEVE_ARTIFACT = "sieve.json"
    SIEVE_CSV = "sieve.csv"
    SPECTRAL_ARTIFACT = "spectral.json"
    REPORT_ARTIFACT = "report.json"
    RUNTIME_ARTIFACT = "runtime.json"
    GROWTH_CSV = "growth_loglog.csv"
    RATIO_CSV = "ratio_by_decade.csv"
    ADMISSIBLE_R_CSV = "admissible_r.csv"
