//! Permutation signs and the rank-3 Levi-Civita symbol.

/// Sign of the permutation sorting `idx` ascending; 0 if any index repeats.
pub fn perm_sign(idx: &[u8]) -> i8 {
    let mut v = idx.to_vec();
    let mut sign = 1i8;
    for i in 0..v.len() {
        for j in (i + 1)..v.len() {
            match v[j].cmp(&v[i]) {
                std::cmp::Ordering::Less => {
                    v.swap(i, j);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return 0,
                std::cmp::Ordering::Greater => {}
            }
        }
    }
    sign
}

/// Levi-Civita symbol on three local indices 0,1,2 with eps(0,1,2) = +1.
pub fn eps3(a: usize, b: usize, c: usize) -> i32 {
    perm_sign(&[a as u8, b as u8, c as u8]) as i32
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signs() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[2, 0, 1]), 1);
        assert_eq!(perm_sign(&[0, 0, 1]), 0);
        assert_eq!(eps3(2, 1, 0), -1);
    }
}
