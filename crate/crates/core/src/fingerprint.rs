use sha2::{Digest, Sha256};

/// Accumulates a SHA-256 digest over primitive values; used to tag
/// partitions and forests so reports can show which runs shared inputs.
pub(crate) struct Fingerprint(Sha256);

impl Fingerprint {
    pub(crate) fn new(domain: &str) -> Self {
        let mut h = Sha256::new();
        h.update(domain.as_bytes());
        Fingerprint(h)
    }

    pub(crate) fn usize(&mut self, v: usize) -> &mut Self {
        self.0.update((v as u64).to_le_bytes());
        self
    }

    pub(crate) fn f64(&mut self, v: f64) -> &mut Self {
        self.0.update(v.to_bits().to_le_bytes());
        self
    }

    pub(crate) fn usizes(&mut self, vs: &[usize]) -> &mut Self {
        self.usize(vs.len());
        for &v in vs {
            self.usize(v);
        }
        self
    }

    pub(crate) fn str(&mut self, s: &str) -> &mut Self {
        self.usize(s.len());
        self.0.update(s.as_bytes());
        self
    }

    /// First 16 hex digits of the digest.
    pub(crate) fn finish(self) -> String {
        let out = self.0.finalize();
        out.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}
