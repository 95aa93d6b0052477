//! Substitutions bundled with the toolkit, parsed from `specs/`.

use crate::substitution::{parse_substitution, RandomSubstitution};

macro_rules! bundled {
    ($(#[$doc:meta])* $name:ident, $file:literal) => {
        $(#[$doc])*
        pub fn $name() -> RandomSubstitution {
            parse_substitution(include_str!(concat!("../../../specs/", $file)))
                .expect(concat!("bundled spec ", $file, " must parse"))
        }
    };
}

bundled!(
    /// a -> {ab, ba}, b -> {aa}.
    period_doubling,
    "period-doubling.sub"
);
bundled!(
    /// a -> {ab, ba}, b -> {a}.
    random_fibonacci,
    "random-fibonacci.sub"
);
bundled!(
    /// a -> {aab}, b -> {ab, ba}.
    square_fibonacci,
    "square-fibonacci.sub"
);
bundled!(
    /// a -> {abb, bab}, b -> {aa}.
    abb_bab,
    "abb-bab.sub"
);
bundled!(
    /// Three letters, images closed under the cyclic relabelling 0 -> 1 -> 2 -> 0.
    example5,
    "example5.sub"
);
bundled!(
    /// Constant length four, a -> {abaa, aaba}, b -> {abab, baba}.
    abaa_aaba,
    "abaa-aaba.sub"
);

/// All bundled substitutions with their file stems.
pub fn all() -> Vec<(&'static str, RandomSubstitution)> {
    vec![
        ("period-doubling", period_doubling()),
        ("random-fibonacci", random_fibonacci()),
        ("square-fibonacci", square_fibonacci()),
        ("abb-bab", abb_bab()),
        ("example5", example5()),
        ("abaa-aaba", abaa_aaba()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_parse_and_are_primitive_and_compatible() {
        for (name, sub) in all() {
            assert!(sub.is_compatible(), "{name} must be compatible");
            assert!(sub.is_primitive(), "{name} must be primitive");
        }
    }
}
