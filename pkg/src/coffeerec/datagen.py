"""Deterministic stand-in for the scraped coffee review CSV.

The public scrape of the Coffee Quality Institute database is not
redistributable inside this repository, so tests and the bundled demo
run against a generated file with the same schema (44 columns), the same
row composition (1340 reviews: 1312 arabica, 28 robusta), realistic
score distributions (tight sensory scores around 7.5 with strong
inter-correlations, spiky uniformity/sweetness concentrated at 10), and
group structure by origin/variety/processing that carries genuine signal
into the subjective scores. A fixed set of defective rows exercises
every cleaning rule.

Everything is a pure function of the seed; regenerating with the default
seed reproduces data/coffee_reviews.csv byte for byte.

Usage: python -m coffeerec.datagen [path] [seed]
"""

from __future__ import annotations

import csv

import numpy as np

DEFAULT_DATA_SEED = 20

TOTAL_ROWS = 1340
ROBUSTA_ROWS = 28

# Signal/noise calibration (see README): sensory score =
# base + gain * q + KAPPA-weighted shared reviewer factor + noise.
# The noise is a Gaussian scale mixture: most reviews land close to the
# conditional mean, a small fraction carries a large outlier component
# (off cups / dissenting judges), which is what the real cupping data
# looks like and what keeps RMSE realistic without scattering every bean.
COUNTRY_EFFECT_STD = 0.22
REGION_EFFECT_STD = 0.06
VARIETY_EFFECT_STD = 0.16
PROCESSING_EFFECT_STD = 0.05
KAPPA = 0.05  # shared per-review (unpredictable) factor
ETA_SMALL = 0.07  # everyday per-attribute noise
ETA_OUTLIER = 1.0  # rare off-cup component
ETA_OUTLIER_P = 0.09
ROBUSTA_SHIFT = -0.35

# Uniformity/clean-cup/sweetness sit at 10 minus an exponential defect
# tail that shrinks for high-quality lots, plus a rare crash.
SPIKY_SCALE = 0.18
SPIKY_Q_GAIN = 1.2
SPIKY_CRASH_P = 0.05
SPIKY_CRASH_SCALE = 1.2

SENSORY = (
    ("Aroma", 7.57, 1.00),
    ("Flavor", 7.53, 1.05),
    ("Aftertaste", 7.40, 1.05),
    ("Acidity", 7.54, 0.95),
    ("Body", 7.51, 0.90),
    ("Balance", 7.50, 1.00),
)

ARABICA_COUNTRIES = (
    ("Mexico", 230), ("Colombia", 180), ("Guatemala", 178), ("Brazil", 130),
    ("Taiwan", 74), ("United States (Hawaii)", 72), ("Honduras", 52),
    ("Costa Rica", 50), ("Ethiopia", 44), ("Tanzania", 40), ("Uganda", 26),
    ("Thailand", 32), ("Nicaragua", 26), ("Kenya", 25), ("El Salvador", 21),
    ("Indonesia", 20), ("China", 16), ("India", 10), ("Peru", 10),
    ("Vietnam", 7), ("Myanmar", 8), ("Haiti", 6), ("Panama", 4),
    ("Malawi", 11), ("Laos", 7), ("Burundi", 2), ("Papua New Guinea", 1),
    ("Ecuador", 3), ("Philippines", 5), ("Japan", 1), ("Rwanda", 1),
    ("Zambia", 3),
)
ROBUSTA_COUNTRIES = (
    ("Uganda", 10), ("India", 6), ("Vietnam", 5), ("Ecuador", 4),
    ("United States", 3),
)

REGIONS_PER_COUNTRY = 3
REGION_NAMES = (
    "norte", "sur", "central valley", "highlands", "sierra", "oriente",
    "lakeshore", "plateau", "mountain district", "coastal ridge",
)

VARIETIES = (
    "Caturra", "Bourbon", "Typica", "Catuai", "Yellow Bourbon", "Mundo Novo",
    "SL14", "SL28", "SL34", "Gesha", "Pacas", "Pacamara", "Castillo",
    "Colombia", "Java", "Blue Mountain", "Peaberry", "Ruiru 11", "Sumatra",
    "Ethiopian Heirlooms", "Arusha", "Catimor",
)
COLORS = ("Green", "Bluish-Green", "Blue-Green")
PROCESSING = (
    "Washed / Wet", "Natural / Dry", "Semi-washed / Semi-pulped",
    "Pulped natural / honey", "Other",
)

OWNERS = (
    "metad plc", "exportadora andina", "grounds for health admin",
    "valley roasters", "juan luis alvarado romero", "bean traders co",
    "nucoffee", "racafe & cia sca", "ipanema coffees", "cqi taiwan icp",
)
PARTNERS = (
    "Specialty Coffee Association", "AMECAFE", "Almacafe",
    "Instituto Hondureno del Cafe", "NUCOFFEE", "Uganda Coffee Development Authority",
)
CERT_BODIES = PARTNERS

HEADER = (
    "", "Species", "Owner", "Country.of.Origin", "Farm.Name", "Lot.Number",
    "Mill", "ICO.Number", "Company", "Altitude", "Region", "Producer",
    "Number.of.Bags", "Bag.Weight", "In.Country.Partner", "Harvest.Year",
    "Grading.Date", "Owner.1", "Variety", "Processing.Method", "Aroma",
    "Flavor", "Aftertaste", "Acidity", "Body", "Balance", "Uniformity",
    "Clean.Cup", "Sweetness", "Cupper.Points", "Total.Cup.Points", "Moisture",
    "Category.One.Defects", "Quakers", "Color", "Category.Two.Defects",
    "Expiration", "Certification.Body", "Certification.Address",
    "Certification.Contact", "unit_of_measurement", "altitude_low_meters",
    "altitude_high_meters", "altitude_mean_meters",
)


def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def _snap_score(x) -> float:
    """Cupping scores land on a twelfth grid, reported with 2 decimals."""
    return round(np.round(x * 12.0) / 12.0, 2)


def _effect_table(rng, keys, std):
    return {key: rng.normal(0.0, std) for key in keys}


def _spiky_scores(rng, q, n):
    tail = rng.exponential(SPIKY_SCALE, size=n) * np.exp(-SPIKY_Q_GAIN * q)
    crash = (rng.random(n) < SPIKY_CRASH_P) * rng.exponential(SPIKY_CRASH_SCALE, size=n)
    return np.array([_snap_score(v) for v in np.clip(10.0 - tail - crash, 6.0, 10.0)])


def _sensory_noise(rng):
    if rng.random() < ETA_OUTLIER_P:
        return rng.normal(0.0, ETA_OUTLIER)
    return rng.normal(0.0, ETA_SMALL)


def generate_rows(seed: int = DEFAULT_DATA_SEED) -> list:
    """All 1340 review rows as dicts keyed by HEADER names."""
    tables_rng = np.random.default_rng(np.random.SeedSequence((seed, 0)))
    rows_rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    defect_rng = np.random.default_rng(np.random.SeedSequence((seed, 2)))

    country_names = [c for c, _ in ARABICA_COUNTRIES] + [
        c for c, _ in ROBUSTA_COUNTRIES if c not in dict(ARABICA_COUNTRIES)
    ]
    country_effect = _effect_table(tables_rng, country_names, COUNTRY_EFFECT_STD)
    region_pool = {
        country: [
            f"{REGION_NAMES[int(tables_rng.integers(len(REGION_NAMES)))]} {i + 1}"
            for i in range(REGIONS_PER_COUNTRY)
        ]
        for country in country_names
    }
    region_effect = {
        (country, region): tables_rng.normal(0.0, REGION_EFFECT_STD)
        for country, regions in region_pool.items()
        for region in regions
    }
    variety_effect = _effect_table(tables_rng, VARIETIES, VARIETY_EFFECT_STD)
    processing_effect = _effect_table(tables_rng, PROCESSING, PROCESSING_EFFECT_STD)
    # Countries favor a subset of varieties; this creates sizable
    # country x variety groups instead of singletons.
    country_varieties = {
        country: list(tables_rng.choice(len(VARIETIES), size=5, replace=False))
        for country in country_names
    }

    arabica_weights = np.array([w for _, w in ARABICA_COUNTRIES], dtype=np.float64)
    arabica_weights /= arabica_weights.sum()
    robusta_weights = np.array([w for _, w in ROBUSTA_COUNTRIES], dtype=np.float64)
    robusta_weights /= robusta_weights.sum()

    rows = []
    n_arabica = TOTAL_ROWS - ROBUSTA_ROWS
    for index in range(TOTAL_ROWS):
        robusta = index >= n_arabica
        species = "Robusta" if robusta else "Arabica"
        if robusta:
            country = ROBUSTA_COUNTRIES[
                int(rows_rng.choice(len(ROBUSTA_COUNTRIES), p=robusta_weights))
            ][0]
        else:
            country = ARABICA_COUNTRIES[
                int(rows_rng.choice(len(ARABICA_COUNTRIES), p=arabica_weights))
            ][0]
        region = region_pool[country][int(rows_rng.integers(REGIONS_PER_COUNTRY))]
        variety = VARIETIES[
            country_varieties[country][int(rows_rng.integers(5))]
        ]
        processing = PROCESSING[
            int(rows_rng.choice(len(PROCESSING), p=(0.55, 0.25, 0.08, 0.07, 0.05)))
        ]
        color = COLORS[int(rows_rng.choice(len(COLORS), p=(0.72, 0.18, 0.10)))]

        cat_one = 0 if defect_rng.random() < 0.72 else int(defect_rng.geometric(0.45))
        cat_two = 0 if defect_rng.random() < 0.38 else int(defect_rng.geometric(0.28))
        cat_one = min(cat_one, 31)
        cat_two = min(cat_two, 47)
        if defect_rng.random() < 0.08:
            moisture = 0.0
        else:
            moisture = float(np.clip(defect_rng.normal(0.108, 0.022), 0.05, 0.17))
        quakers = 0 if defect_rng.random() < 0.8 else int(defect_rng.geometric(0.6))

        q = (
            country_effect[country]
            + region_effect[(country, region)]
            + variety_effect[variety]
            + processing_effect[processing]
            - 0.045 * min(cat_one, 10)
            - 0.014 * min(cat_two, 25)
            - (4.5 * (moisture - 0.108) if moisture > 0.0 else 0.0)
            + (ROBUSTA_SHIFT if robusta else 0.0)
        )
        shared = rows_rng.normal(0.0, KAPPA)
        sensory = {}
        for attr, base, gain in SENSORY:
            raw = base + gain * q + shared + _sensory_noise(rows_rng)
            sensory[attr] = _snap_score(np.clip(raw, 5.0, 9.5))
        uniformity, clean_cup, sweetness = _spiky_scores(rows_rng, q, 3)
        cupper = _snap_score(
            np.clip(7.45 + 1.1 * q + shared + _sensory_noise(rows_rng), 5.0, 9.5)
        )
        total = (
            sum(sensory.values()) + uniformity + clean_cup + sweetness + cupper
        )

        year = int(rows_rng.integers(2012, 2019))
        owner = OWNERS[int(rows_rng.integers(len(OWNERS)))]
        partner = PARTNERS[int(rows_rng.integers(len(PARTNERS)))]
        if rows_rng.random() < 0.08:
            altitude = {"Altitude": "", "unit_of_measurement": "",
                        "altitude_low_meters": "", "altitude_high_meters": "",
                        "altitude_mean_meters": ""}
        else:
            mean_alt = rows_rng.uniform(600.0, 2200.0)
            low = mean_alt - rows_rng.uniform(0.0, 150.0)
            high = mean_alt + rows_rng.uniform(0.0, 150.0)
            altitude = {
                "Altitude": f"{int(low)}-{int(high)}",
                "unit_of_measurement": "m",
                "altitude_low_meters": f"{low:.1f}",
                "altitude_high_meters": f"{high:.1f}",
                "altitude_mean_meters": f"{mean_alt:.1f}",
            }

        row = {
            "": str(index + 1),
            "Species": species,
            "Owner": owner,
            "Country.of.Origin": country,
            "Farm.Name": f"finca {owner.split()[0]} {int(rows_rng.integers(1, 80)):02d}",
            "Lot.Number": str(int(rows_rng.integers(1, 9000))),
            "Mill": f"{country.lower()} mill {int(rows_rng.integers(1, 40))}",
            "ICO.Number": f"{int(rows_rng.integers(1, 999)):03d}-{int(rows_rng.integers(1, 9999)):04d}",
            "Company": owner,
            "Region": region,
            "Producer": owner.title(),
            "Number.of.Bags": str(int(rows_rng.integers(1, 350))),
            "Bag.Weight": f"{int(rows_rng.choice((30, 60, 69, 70)))} kg",
            "In.Country.Partner": partner,
            "Harvest.Year": str(year),
            "Grading.Date": f"{year}-{int(rows_rng.integers(1, 13)):02d}-{int(rows_rng.integers(1, 29)):02d}",
            "Owner.1": owner,
            "Variety": variety,
            "Processing.Method": processing,
            "Aroma": f"{sensory['Aroma']:.2f}",
            "Flavor": f"{sensory['Flavor']:.2f}",
            "Aftertaste": f"{sensory['Aftertaste']:.2f}",
            "Acidity": f"{sensory['Acidity']:.2f}",
            "Body": f"{sensory['Body']:.2f}",
            "Balance": f"{sensory['Balance']:.2f}",
            "Uniformity": f"{uniformity:.2f}",
            "Clean.Cup": f"{clean_cup:.2f}",
            "Sweetness": f"{sweetness:.2f}",
            "Cupper.Points": f"{cupper:.2f}",
            "Total.Cup.Points": f"{total:.2f}",
            "Moisture": f"{moisture:.4f}",
            "Category.One.Defects": str(cat_one),
            "Quakers": str(quakers),
            "Color": color,
            "Category.Two.Defects": str(cat_two),
            "Expiration": f"{year + 1}-{int(rows_rng.integers(1, 13)):02d}-{int(rows_rng.integers(1, 29)):02d}",
            "Certification.Body": partner,
            "Certification.Address": f"{int(rows_rng.integers(1, 900))} certification road",
            "Certification.Contact": f"+{int(rows_rng.integers(1, 99))}-{int(rows_rng.integers(1000000, 9999999))}",
        }
        row.update(altitude)
        rows.append(row)

    _plant_defects(rows, seed)
    return rows


def _plant_defects(rows, seed):
    """Deterministically damage a fixed set of arabica rows so every
    cleaning rule fires; robusta rows are left intact."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 3)))
    n_arabica = TOTAL_ROWS - ROBUSTA_ROWS
    damaged = rng.choice(n_arabica, size=100, replace=False)
    groups = {
        "zero_score": damaged[:20],
        "blank_score": damaged[20:32],
        "blank_moisture": damaged[32:42],
        "blank_country": damaged[42:48],
        "text_moisture": damaged[48:52],
        "blank_defects": damaged[52:55],
        "percent_moisture": damaged[55:100],
    }
    score_cols = ("Aroma", "Flavor", "Aftertaste", "Acidity", "Body", "Balance",
                  "Uniformity", "Sweetness")
    for i in groups["zero_score"]:
        rows[i][score_cols[int(rng.integers(len(score_cols)))]] = "0.00"
    for i in groups["blank_score"]:
        rows[i][score_cols[int(rng.integers(len(score_cols)))]] = ""
    for i in groups["blank_moisture"]:
        rows[i]["Moisture"] = ""
    for i in groups["blank_country"]:
        rows[i]["Country.of.Origin"] = ""
    for i in groups["text_moisture"]:
        rows[i]["Moisture"] = "n/a"
    for i in groups["blank_defects"]:
        rows[i]["Category.One.Defects"] = ""
    for i in groups["percent_moisture"]:
        value = float(rows[i]["Moisture"])
        if value <= 0.0:
            value = 0.11
        rows[i]["Moisture"] = f"{value * 100.0:.2f}"
    # A sprinkle of blank optional categoricals exercises the unknown fill.
    for column, count in (("Region", 35), ("Variety", 50),
                          ("Processing.Method", 25), ("Color", 30)):
        for i in rng.choice(n_arabica, size=count, replace=False):
            rows[i][column] = ""


def write_csv(path: str, seed: int = DEFAULT_DATA_SEED):
    rows = generate_rows(seed)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(HEADER)
        for row in rows:
            writer.writerow([row.get(col, "") for col in HEADER])


if __name__ == "__main__":
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else "data/coffee_reviews.csv"
    chosen_seed = int(sys.argv[2]) if len(sys.argv) > 2 else DEFAULT_DATA_SEED
    write_csv(target, chosen_seed)
    print(f"wrote {TOTAL_ROWS} reviews to {target} (seed {chosen_seed})")
