/// Numerical tolerances used by validation throughout the workspace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Max entrywise `|M - M^dagger|`.
    pub hermitian: f64,
    /// Smallest admissible eigenvalue of a PSD operator.
    pub psd_floor: f64,
    /// Allowed deviation of the trace from its target.
    pub trace: f64,
    /// Generic equality tolerance for derived quantities.
    pub equality: f64,
    /// Allowed deviation of a state vector norm from 1.
    pub norm: f64,
    /// Eigenvalue cutoff for rank truncation.
    pub rank_cutoff: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        hermitian: 1e-10,
        psd_floor: -1e-9,
        trace: 1e-9,
        equality: 1e-8,
        norm: 1e-10,
        rank_cutoff: 1e-10,
    };
}
