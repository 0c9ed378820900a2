"""Canonical attribute names, ordering, and score ranges.

Every matrix, distance computation, report, and wire format in this
package uses the orderings defined here. Do not reorder.
"""

# Subjective quality scores, in canonical vector order.
SUBJECTIVE_ATTRIBUTES = (
    "aroma",
    "flavour",
    "body",
    "sweetness",
    "acidity",
    "balance",
    "uniformity",
    "aftertaste",
)

# Objective bean properties, in canonical export order.
OBJECTIVE_CATEGORICAL = (
    "species",
    "country_of_origin",
    "region",
    "variety",
    "color",
    "processing_method",
)
OBJECTIVE_NUMERIC = (
    "category_one_defects",
    "category_two_defects",
    "moisture",
)
OBJECTIVE_ATTRIBUTES = (
    "species",
    "country_of_origin",
    "region",
    "variety",
    "color",
    "category_one_defects",
    "category_two_defects",
    "processing_method",
    "moisture",
)

N_SUBJECTIVE = len(SUBJECTIVE_ATTRIBUTES)

# Scores live in (0, 10]; 0.01 is the clamp floor for model outputs.
SCORE_MAX = 10.0
SCORE_FLOOR = 0.01

SPECIES_VALUES = ("arabica", "robusta")

# Label used when an optional categorical cell is blank.
UNKNOWN_LABEL = "unknown"

DEFAULT_SEED = 7
