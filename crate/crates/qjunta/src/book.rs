//! Runs every Rust snippet in the guide as a doc-test, so the book cannot
//! drift from the API it documents.

macro_rules! chapter {
    ($name:ident, $path:literal) => {
        #[doc = include_str!($path)]
        mod $name {}
    };
}

chapter!(introduction, "../../../book/src/introduction.md");
chapter!(pauli_spectra, "../../../book/src/pauli-spectra.md");
chapter!(
    influence_and_distance,
    "../../../book/src/influence-and-distance.md"
);
chapter!(oracle_access, "../../../book/src/oracle-access.md");
chapter!(testing, "../../../book/src/testing.md");
chapter!(learning, "../../../book/src/learning.md");
chapter!(verification, "../../../book/src/verification.md");
chapter!(cli, "../../../book/src/cli.md");
