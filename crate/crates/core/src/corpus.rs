//! Named example scripts shipped with the crate.

/// `(name, source)` for every corpus script.
pub const SCRIPTS: &[(&str, &str)] = &[
    ("nagata", include_str!("../corpus/nagata.tan")),
    ("anick", include_str!("../corpus/anick.tan")),
    ("bergman", include_str!("../corpus/bergman.tan")),
    ("drensky-exp", include_str!("../corpus/drensky-exp.tan")),
    ("tau", include_str!("../corpus/tau.tan")),
    ("chein-cubic", include_str!("../corpus/chein-cubic.tan")),
    ("lie-nilpotent", include_str!("../corpus/lie-nilpotent.tan")),
    ("polynilpotent", include_str!("../corpus/polynilpotent.tan")),
];

pub fn source(name: &str) -> Option<&'static str> {
    SCRIPTS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SCRIPTS.iter().map(|(n, _)| *n)
}
