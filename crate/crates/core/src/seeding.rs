//! Counter-based derivation of independent RNG streams from one master seed.

use rand::SeedableRng;

use crate::Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed for stream `index` of `component`. Streams do not depend on the order
/// in which they are requested.
pub fn derive_seed(master: u64, component: &str, index: u64) -> u64 {
    let stream = splitmix64(fnv1a(component.as_bytes()) ^ splitmix64(index));
    splitmix64(master ^ stream)
}

pub fn derive_rng(master: u64, component: &str, index: u64) -> Rng {
    Rng::seed_from_u64(derive_seed(master, component, index))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_stable() {
        let a = derive_seed(7, "realize", 0);
        assert_eq!(a, derive_seed(7, "realize", 0));
        assert_ne!(a, derive_seed(7, "realize", 1));
        assert_ne!(a, derive_seed(7, "contagion", 0));
        assert_ne!(a, derive_seed(8, "realize", 0));
    }
}
