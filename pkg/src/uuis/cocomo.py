"""COCOMO cost estimation (intermediate model, organic mode by default).

Effort E = a·KLOC^b·EAF person-months, schedule D = c·E^d months, people
P = E/D, cost C = P·D·CP = E·CP. The effort adjustment factor is the product
of fifteen cost-driver multipliers; cells the grid leaves blank are invalid
ratings for that driver. Computation is always carried out at full precision;
rounding is a display concern.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import err

RATINGS = ("very_low", "low", "nominal", "high", "very_high", "extra_high")

# driver -> rating -> multiplier; absent cells are undefined for that driver
COST_DRIVERS: dict[str, dict[str, float]] = {
    # product attributes
    "required_software_reliability":
        {"very_low": 0.75, "low": 0.88, "nominal": 1.0, "high": 1.15, "very_high": 1.4},
    "size_of_application_database":
        {"low": 0.94, "nominal": 1.0, "high": 1.08, "very_high": 1.16},
    "complexity_of_product":
        {"very_low": 0.7, "low": 0.85, "nominal": 1.0, "high": 1.15,
         "very_high": 1.3, "extra_high": 1.65},
    # hardware attributes
    "runtime_performance_constraints":
        {"nominal": 1.0, "high": 1.11, "very_high": 1.3, "extra_high": 1.66},
    "memory_constraints":
        {"nominal": 1.0, "high": 1.06, "very_high": 1.21, "extra_high": 1.56},
    "virtual_machine_volatility":
        {"low": 0.87, "nominal": 1.0, "high": 1.15, "very_high": 1.3},
    "required_turnabout_time":
        {"low": 0.87, "nominal": 1.0, "high": 1.07, "very_high": 1.15},
    # personnel attributes
    "analyst_capability":
        {"very_low": 1.46, "low": 1.19, "nominal": 1.0, "high": 0.86, "very_high": 0.71},
    "applications_experience":
        {"very_low": 1.29, "low": 1.13, "nominal": 1.0, "high": 0.91, "very_high": 0.82},
    "software_engineer_capability":
        {"very_low": 1.42, "low": 1.17, "nominal": 1.0, "high": 0.86, "very_high": 0.7},
    "virtual_machine_experience":
        {"very_low": 1.21, "low": 1.1, "nominal": 1.0, "high": 0.9},
    "programming_language_experience":
        {"very_low": 1.14, "low": 1.07, "nominal": 1.0, "high": 0.95},
    # project attributes
    "software_engineering_methods":
        {"very_low": 1.24, "low": 1.1, "nominal": 1.0, "high": 0.91, "very_high": 0.82},
    "software_tools":
        {"very_low": 1.24, "low": 1.1, "nominal": 1.0, "high": 0.91, "very_high": 0.83},
    "required_development_schedule":
        {"very_low": 1.23, "low": 1.08, "nominal": 1.0, "high": 1.04, "very_high": 1.1},
}

# mode -> (a, b, c, d)
MODES: dict[str, tuple[float, float, float, float]] = {
    "organic": (3.2, 1.05, 2.5, 0.38),
    "semidetached": (3.0, 1.12, 2.5, 0.35),
    "embedded": (2.8, 1.20, 2.5, 0.32),
}


def eaf(ratings: dict[str, str] | None = None) -> float:
    """Product of the driver multipliers; omitted drivers count as nominal."""
    ratings = ratings or {}
    for driver in ratings:
        if driver not in COST_DRIVERS:
            raise err("VALIDATION", f"unknown cost driver {driver!r}")
    product = 1.0
    for driver, cells in COST_DRIVERS.items():
        rating = ratings.get(driver, "nominal")
        if rating not in RATINGS:
            raise err("VALIDATION", f"unknown rating {rating!r}")
        if rating not in cells:
            raise err("VALIDATION",
                      f"{driver} has no multiplier for rating {rating!r}")
        product *= cells[rating]
    return product


@dataclass(frozen=True)
class CocomoInput:
    kloc: float
    eaf: float = 1.0
    cost_per_pm: float = 0.0
    a: float = 3.2
    b: float = 1.05
    c: float = 2.5
    d: float = 0.38

    def __post_init__(self) -> None:
        if self.kloc <= 0:
            raise err("VALIDATION", "kloc must be positive")
        if self.eaf <= 0:
            raise err("VALIDATION", "eaf must be positive")


@dataclass(frozen=True)
class CocomoResult:
    effort_pm: float
    schedule_months: float
    people: float
    cost: float

    def rounded(self) -> dict[str, float]:
        return {
            "effort_pm": round(self.effort_pm, 2),
            "schedule_months": round(self.schedule_months, 2),
            "people": round(self.people, 2),
            "cost": round(self.cost, 4),
        }


def estimate(inp: CocomoInput) -> CocomoResult:
    effort = inp.a * inp.kloc ** inp.b * inp.eaf
    schedule = inp.c * effort ** inp.d
    people = effort / schedule
    cost = people * schedule * inp.cost_per_pm
    return CocomoResult(effort_pm=effort, schedule_months=schedule,
                        people=people, cost=cost)


def make_input(kloc: float, *, mode: str = "organic", eaf_value: float | None = None,
               ratings: dict[str, str] | None = None,
               cost_per_pm: float = 0.0) -> CocomoInput:
    if mode not in MODES:
        raise err("VALIDATION", f"unknown mode {mode!r}; pick one of {sorted(MODES)}")
    a, b, c, d = MODES[mode]
    factor = eaf_value if eaf_value is not None else eaf(ratings)
    return CocomoInput(kloc=kloc, eaf=factor, cost_per_pm=cost_per_pm, a=a, b=b, c=c, d=d)
