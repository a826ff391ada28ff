//! Reference invariant tables for `K = Q(ζ_5)` at conductors `5 O_K` and
//! `6 O_K`, indexed by class label `C_1, …, C_n`.

/// One reference row: the characteristic numerators and the value as
/// `(re, im)` decimal strings at six significant digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReferenceRow {
    pub label: usize,
    pub r_vector: [i64; 4],
    pub re: &'static str,
    pub im: &'static str,
}

const LEVEL_5: [ReferenceRow; 5] = [
    ReferenceRow { label: 1, r_vector: [1, 2, 0, 3], re: "-2.13359e-69", im: "4.17297e-70" },
    ReferenceRow { label: 2, r_vector: [3, 1, 3, 2], re: "4.16089e-50", im: "-1.58401e-50" },
    ReferenceRow { label: 3, r_vector: [3, 0, 2, 2], re: "4.16089e-50", im: "1.58401e-50" },
    ReferenceRow { label: 4, r_vector: [2, 2, 4, 4], re: "-2.13359e-69", im: "-4.17297e-70" },
    ReferenceRow { label: 5, r_vector: [1, 1, 0, 1], re: "4.85930e-254", im: "0" },
];

const LEVEL_6: [ReferenceRow; 10] = [
    ReferenceRow { label: 1, r_vector: [2, 3, 0, 4], re: "-1.68219e-66", im: "-1.88870e-66" },
    ReferenceRow { label: 2, r_vector: [2, 5, 0, 2], re: "9.08964e-135", im: "7.01165e-135" },
    ReferenceRow { label: 3, r_vector: [3, 4, 4, 4], re: "-3.16257e-65", im: "1.88358e-65" },
    ReferenceRow { label: 4, r_vector: [5, 3, 0, 3], re: "2.29176e-93", im: "1.51419e-93" },
    ReferenceRow { label: 5, r_vector: [5, 0, 0, 4], re: "8.33316e-136", im: "0" },
    ReferenceRow { label: 6, r_vector: [5, 2, 0, 2], re: "2.29176e-93", im: "-1.51419e-93" },
    ReferenceRow { label: 7, r_vector: [4, 2, 1, 3], re: "-3.16257e-65", im: "-1.88358e-65" },
    ReferenceRow { label: 8, r_vector: [3, 1, 0, 3], re: "9.08964e-135", im: "-7.01165e-135" },
    ReferenceRow { label: 9, r_vector: [5, 3, 0, 1], re: "-1.68219e-66", im: "1.88870e-66" },
    ReferenceRow { label: 10, r_vector: [5, 5, 0, 5], re: "3.26284e-348", im: "0" },
];

/// Reference rows for `(ℓ, N)`, if any.
pub fn reference_table(ell: u32, level: i64) -> Option<&'static [ReferenceRow]> {
    match (ell, level) {
        (5, 5) => Some(&LEVEL_5),
        (5, 6) => Some(&LEVEL_6),
        _ => None,
    }
}

/// Reference generator of the class group at conductor `5 O_K`, in the
/// basis `1, ζ, ζ^2, …`.
pub const GENERATOR_LEVEL_5: [i64; 4] = [2, 1, 0, 0];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_are_complete() {
        assert_eq!(reference_table(5, 5).unwrap().len(), 5);
        assert_eq!(reference_table(5, 6).unwrap().len(), 10);
        assert!(reference_table(7, 5).is_none());
        for (k, row) in reference_table(5, 6).unwrap().iter().enumerate() {
            assert_eq!(row.label, k + 1);
            assert!(row.r_vector.iter().all(|&x| (0..6).contains(&x)));
        }
    }
}
