//! Canonical 48-emotion circumplex coordinates and analysis clusters.
//!
//! Values are the shipped data asset (version [`CATALOG_VERSION`]). Names are
//! the detector's canonical labels and double as the `emotions.csv` header.

pub const CATALOG_VERSION: &str = "circumplex-48/1";

pub const NUM_EMOTIONS: usize = 48;

/// `(name, x, y)`: x is valence (negative..positive), y is activation.
pub const EMOTIONS: [(&str, f64, f64); NUM_EMOTIONS] = [
    ("Admiration", 0.05, 0.85),
    ("Adoration", 0.05, 0.9),
    ("Aesthetic Appreciation", 0.2, 0.1),
    ("Amusement", 0.55, 0.2),
    ("Anger", -0.4, 0.8),
    ("Anxiety", -0.73, -0.8),
    ("Awe", 0.05, 0.95),
    ("Awkwardness", -0.68, -0.38),
    ("Boredom", -0.32, -0.8),
    ("Calmness", 0.75, -0.7),
    ("Concentration", 0.1, -0.1),
    ("Contemplation", 0.6, -0.4),
    ("Confusion", -0.6, 0.4),
    ("Contempt", -0.575, 0.675),
    ("Contentment", 0.82, -0.58),
    ("Craving", 0.22, 0.75),
    ("Determination", 0.75, 0.25),
    ("Disappointment", -0.8, -0.1),
    ("Disgust", -0.675, 0.5),
    ("Distress", -0.6, -0.175),
    ("Doubt", -0.28, -0.95),
    ("Ecstasy", 0.65, 0.7),
    ("Embarrassment", -0.32, -0.6),
    ("Empathic Pain", 0.38, -0.82),
    ("Entrancement", 0.3, -0.6),
    ("Envy", -0.28, 0.82),
    ("Excitement", 0.5, 0.35),
    ("Fear", -0.12, 0.78),
    ("Guilt", -0.4, -0.42),
    ("Horror", -0.08, 0.78),
    ("Interest", 0.65, 0.05),
    ("Joy", 0.95, 0.115),
    ("Love", 0.95, 0.175),
    ("Nostalgia", 0.22, -0.43),
    ("Pain", -0.95, -0.5),
    ("Pride", 0.42, 0.65),
    ("Realization", 0.42, 0.62),
    ("Relief", 0.78, -0.6),
    ("Romance", 0.85, -0.125),
    ("Sadness", -0.8, -0.4),
    ("Satisfaction", 0.8, -0.65),
    ("Sexual Desire", 0.22, 0.85),
    ("Shame", -0.42, -0.5),
    ("Surprise (positive)", 0.42, 0.88),
    ("Surprise (negative)", -0.42, 0.88),
    ("Sympathy", 0.38, -0.92),
    ("Tiredness", 0.02, -0.99),
    ("Triumph", 0.65, 0.8),
];

pub const ENGAGED_POSITIVE: &str = "Engaged-Positive";
pub const ENGAGED_NEGATIVE: &str = "Engaged-Negative";
pub const ENGAGED: &str = "Engaged";

/// Base clusters. `Engaged` is the union of the two engagement rows and is
/// expanded when the cluster set is built.
pub const CLUSTERS: [(&str, &[&str]); 7] = [
    (
        "Active-Positive",
        &[
            "Amusement",
            "Craving",
            "Determination",
            "Ecstasy",
            "Excitement",
            "Joy",
            "Love",
            "Pride",
            "Satisfaction",
            "Sexual Desire",
            "Surprise (positive)",
            "Triumph",
            "Interest",
            "Realization",
        ],
    ),
    (
        "Active-Negative",
        &[
            "Anger",
            "Contempt",
            "Disgust",
            "Distress",
            "Confusion",
            "Embarrassment",
            "Empathic Pain",
            "Fear",
            "Horror",
            "Pain",
            "Envy",
            "Guilt",
            "Surprise (negative)",
        ],
    ),
    (
        "Passive-Positive",
        &[
            "Admiration",
            "Adoration",
            "Aesthetic Appreciation",
            "Awe",
            "Contentment",
            "Entrancement",
            "Nostalgia",
            "Relief",
            "Romance",
            "Sympathy",
        ],
    ),
    (
        "Strongest-Passive-Positive",
        &["Calmness", "Contemplation", "Concentration"],
    ),
    (
        "Passive-Negative",
        &[
            "Anxiety",
            "Awkwardness",
            "Boredom",
            "Disappointment",
            "Doubt",
            "Sadness",
            "Shame",
            "Tiredness",
        ],
    ),
    (
        ENGAGED_POSITIVE,
        &[
            "Determination",
            "Excitement",
            "Joy",
            "Satisfaction",
            "Surprise (positive)",
            "Interest",
            "Realization",
        ],
    ),
    (
        ENGAGED_NEGATIVE,
        &["Disappointment", "Surprise (negative)", "Anger", "Sadness"],
    ),
];

/// Index of a canonical emotion name, exact match.
pub fn emotion_index(name: &str) -> Option<usize> {
    EMOTIONS.iter().position(|(n, _, _)| *n == name)
}

pub fn emotion_names() -> impl Iterator<Item = &'static str> {
    EMOTIONS.iter().map(|(n, _, _)| *n)
}
