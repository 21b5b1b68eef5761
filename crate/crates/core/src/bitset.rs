//! Fixed-width vertex sets over at most 128 vertices, stored as `u128` masks.

/// Iterator over the set bits of a mask, in increasing order.
pub(crate) fn bits(mut mask: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let v = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(v)
    })
}

pub(crate) fn mask_of(vertices: &[usize]) -> u128 {
    vertices.iter().fold(0u128, |m, &v| m | (1u128 << v))
}

pub(crate) fn to_vec(mask: u128) -> Vec<usize> {
    bits(mask).collect()
}

/// Mask with bits `0..n` set.
pub(crate) fn full(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let m = mask_of(&[0, 5, 127]);
        assert_eq!(to_vec(m), vec![0, 5, 127]);
        assert_eq!(m.count_ones(), 3);
    }

    #[test]
    fn full_masks() {
        assert_eq!(full(0), 0);
        assert_eq!(full(3), 0b111);
        assert_eq!(full(128), u128::MAX);
    }
}
