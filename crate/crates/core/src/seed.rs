//! Fan-out of one master seed into independent sub-seeds.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-seed for a named purpose ("sweep", "split", ...).
pub fn derive(master: u64, purpose: &str) -> u64 {
    // FNV-1a over the purpose tag.
    let tag = purpose.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    });
    splitmix64(master ^ splitmix64(tag))
}

/// Sub-seed for the `index`-th member of an ensemble.
pub fn derive_indexed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index.wrapping_add(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purposes_get_distinct_stable_seeds() {
        assert_eq!(derive(42, "sweep"), derive(42, "sweep"));
        assert_ne!(derive(42, "sweep"), derive(42, "split"));
        assert_ne!(derive(42, "sweep"), derive(43, "sweep"));
        assert_ne!(derive_indexed(1, 0), derive_indexed(1, 1));
    }
}
