//! Odometer-style enumeration of choice functions and subsets.

/// Calls `visit` with every index vector `v` where `v[i] < radices[i]`, in
/// lexicographic order. Nothing is visited if any radix is zero; the empty
/// vector is visited once when `radices` is empty.
pub(crate) fn for_each_choice(radices: &[usize], mut visit: impl FnMut(&[usize])) {
    if radices.contains(&0) {
        return;
    }
    let mut digits = vec![0usize; radices.len()];
    loop {
        visit(&digits);
        let mut position = radices.len();
        loop {
            if position == 0 {
                return;
            }
            position -= 1;
            digits[position] += 1;
            if digits[position] < radices[position] {
                break;
            }
            digits[position] = 0;
        }
    }
}

/// All subsets of `items`, in order of the bitmask that selects them.
pub(crate) fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    assert!(items.len() < usize::BITS as usize, "too many items to enumerate subsets");
    (0usize..1 << items.len())
        .map(|mask| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}
