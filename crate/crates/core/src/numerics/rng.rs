use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Seeded, splittable random stream.
///
/// Backed by ChaCha8 (a counter-based generator). A stream is identified by
/// its root seed plus the path of labels used to split it, so substreams are
/// reproducible regardless of the order in which they are created.
#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    key: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self::with_key(seed, mix(seed ^ 0x5eed_0000_0000_0001))
    }

    fn with_key(seed: u64, key: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(key);
        inner.set_stream(key.rotate_left(17));
        Self { seed, key, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream named by `label`.
    pub fn split(&self, label: &str) -> Rng {
        Self::with_key(self.seed, mix(self.key ^ fnv1a(label.as_bytes())))
    }

    /// Independent child stream named by an index, for per-chunk or per-seed work.
    pub fn split_index(&self, index: u64) -> Rng {
        Self::with_key(
            self.seed,
            mix(self.key ^ mix(index.wrapping_add(0x9e37_79b9))),
        )
    }

    pub fn gaussian(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn sign(&mut self) -> f64 {
        if self.inner.next_u32() & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    pub fn signs(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sign()).collect()
    }

    /// Uniform point on the unit sphere in R^n.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        loop {
            let g = self.gaussian_vector(n);
            let nrm = super::norm2(&g);
            if nrm > 1e-12 {
                return g.into_iter().map(|v| v / nrm).collect();
            }
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}

/// Standard normal vector of length `n` from `rng`.
pub fn gaussian_vector(rng: &mut Rng, n: usize) -> Vec<f64> {
    rng.gaussian_vector(n)
}

fn mix(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a = Rng::new(42).gaussian_vector(1);
        let b = Rng::new(42).gaussian_vector(1);
        assert_eq!(a, b);
        assert_ne!(Rng::new(42).gaussian(), Rng::new(43).gaussian());
    }

    #[test]
    fn substreams_depend_only_on_label() {
        let root = Rng::new(9);
        let mut used = root.clone();
        used.gaussian_vector(10);
        assert_eq!(
            root.split("walk").gaussian_vector(5),
            used.split("walk").gaussian_vector(5)
        );
        assert_ne!(root.split("walk").gaussian(), root.split("lp").gaussian());
        assert_ne!(
            root.split_index(0).gaussian(),
            root.split_index(1).gaussian()
        );
    }

    #[test]
    fn gaussian_moments() {
        let n = 100_000;
        let xs = Rng::new(1).gaussian_vector(n);
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.03, "var {var}");
    }
}
