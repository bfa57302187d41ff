use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::validate_dims;

/// A split of the parties into two nonempty groups.
///
/// `d1 ≤ d2` are the products of the two sides' local dimensions, smaller
/// first, whichever side happens to be stored as `left`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Bipartition {
    party_dims: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    /// `left` lists party indices; the right side is the complement.
    pub fn new(party_dims: &[usize], left: &[usize]) -> Result<Self> {
        validate_dims(party_dims)?;
        let k = party_dims.len();
        if k < 2 {
            return Err(Error::SinglePartySystem);
        }
        let mut l = left.to_vec();
        l.sort_unstable();
        l.dedup();
        if l.len() != left.len() {
            return Err(Error::InvalidBipartition(format!("duplicate party in {left:?}")));
        }
        if let Some(&bad) = l.iter().find(|&&p| p >= k) {
            return Err(Error::InvalidBipartition(format!("party {bad} out of range for {k} parties")));
        }
        if l.is_empty() || l.len() == k {
            return Err(Error::InvalidBipartition("both sides must be nonempty".into()));
        }
        let right = (0..k).filter(|p| !l.contains(p)).collect();
        Ok(Bipartition {
            party_dims: party_dims.to_vec(),
            left: l,
            right,
        })
    }

    /// Both sides given explicitly; they must partition the parties.
    pub fn from_sides(party_dims: &[usize], left: &[usize], right: &[usize]) -> Result<Self> {
        let cut = Self::new(party_dims, left)?;
        let mut r = right.to_vec();
        r.sort_unstable();
        if r != cut.right {
            return Err(Error::InvalidBipartition(format!(
                "{left:?} and {right:?} do not partition {} parties",
                party_dims.len()
            )));
        }
        Ok(cut)
    }

    /// Parses `"A:BC"` (letters) or `"0:1,2"` (indices); `|` also separates.
    pub fn parse(label: &str, party_dims: &[usize]) -> Result<Self> {
        let (l, r) = label
            .split_once(':')
            .or_else(|| label.split_once('|'))
            .ok_or_else(|| Error::InvalidBipartition(format!("'{label}' has no ':' separator")))?;
        let side = |s: &str| -> Result<Vec<usize>> {
            let s = s.trim();
            if s.chars().all(|c| c.is_ascii_alphabetic()) {
                Ok(s.chars().map(|c| (c.to_ascii_uppercase() as u8 - b'A') as usize).collect())
            } else {
                s.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .map_err(|_| Error::InvalidBipartition(format!("bad party '{t}' in '{label}'")))
                    })
                    .collect()
            }
        };
        Self::from_sides(party_dims, &side(l)?, &side(r)?)
    }

    pub fn party_dims(&self) -> &[usize] {
        &self.party_dims
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn left_dim(&self) -> usize {
        self.left.iter().map(|&p| self.party_dims[p]).product()
    }

    pub fn right_dim(&self) -> usize {
        self.right.iter().map(|&p| self.party_dims[p]).product()
    }

    pub fn d1(&self) -> usize {
        self.left_dim().min(self.right_dim())
    }

    pub fn d2(&self) -> usize {
        self.left_dim().max(self.right_dim())
    }

    /// Puts the side with the smaller dimension on the left.
    pub fn normalized(self) -> Self {
        if self.left_dim() > self.right_dim() {
            Bipartition {
                party_dims: self.party_dims,
                left: self.right,
                right: self.left,
            }
        } else {
            self
        }
    }

    pub fn label(&self) -> String {
        let k = self.party_dims.len();
        let side = |ps: &[usize]| -> String {
            if k <= 26 {
                ps.iter().map(|&p| (b'A' + p as u8) as char).collect()
            } else {
                ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
            }
        };
        format!("{}:{}", side(&self.left), side(&self.right))
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Every unordered split, `2^{k−1} − 1` of them, smaller groups first and
/// each normalized so that `left` carries `d1`.
pub fn all_bipartitions(dims: &[usize]) -> Result<Vec<Bipartition>> {
    validate_dims(dims)?;
    let k = dims.len();
    if k < 2 {
        return Err(Error::SinglePartySystem);
    }
    let mut out = Vec::with_capacity((1usize << (k - 1)) - 1);
    for size in 1..=k / 2 {
        for combo in combinations(k, size) {
            if 2 * size == k && combo[0] != 0 {
                continue;
            }
            out.push(Bipartition::new(dims, &combo)?.normalized());
        }
    }
    Ok(out)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        while i > 0 && cur[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        cur[i - 1] += 1;
        for j in i..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(all_bipartitions(&[2, 2]).unwrap().len(), 1);
        assert_eq!(all_bipartitions(&[2, 2, 2, 2]).unwrap().len(), 7);
        assert_eq!(all_bipartitions(&[2, 3, 2, 2, 2]).unwrap().len(), 15);
        assert!(matches!(all_bipartitions(&[4]), Err(Error::SinglePartySystem)));
    }

    #[test]
    fn three_party_labels() {
        let labels: Vec<String> = all_bipartitions(&[2, 2, 2]).unwrap().iter().map(|c| c.label()).collect();
        assert_eq!(labels, ["A:BC", "B:AC", "C:AB"]);
    }

    #[test]
    fn normalization_puts_small_side_left() {
        let cut = Bipartition::new(&[4, 2], &[0]).unwrap().normalized();
        assert_eq!(cut.left(), &[1]);
        assert_eq!((cut.d1(), cut.d2()), (2, 4));
        for cut in all_bipartitions(&[3, 2, 5]).unwrap() {
            assert!(cut.left_dim() <= cut.right_dim());
        }
    }

    #[test]
    fn invalid_cuts() {
        assert!(Bipartition::new(&[2, 2], &[]).is_err());
        assert!(Bipartition::new(&[2, 2], &[0, 1]).is_err());
        assert!(Bipartition::new(&[2, 2], &[2]).is_err());
        assert!(Bipartition::new(&[2, 2, 2], &[0, 0]).is_err());
        assert!(Bipartition::from_sides(&[2, 2, 2], &[0], &[1]).is_err());
    }

    #[test]
    fn parse_round_trip() {
        for cut in all_bipartitions(&[2, 2, 3]).unwrap() {
            assert_eq!(Bipartition::parse(&cut.label(), &[2, 2, 3]).unwrap(), cut);
        }
        assert_eq!(Bipartition::parse("0:1,2", &[2, 2, 2]).unwrap().label(), "A:BC");
        assert!(Bipartition::parse("AB", &[2, 2]).is_err());
    }
}
