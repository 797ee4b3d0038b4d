use serde::{Deserialize, Serialize};

/// Integer partition, parts weakly decreasing and positive.
///
/// Cell `(r, c)` lives in row `r`, column `c < parts[r]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// Sorts and drops zero parts.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|p| *p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self { parts }
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.parts.iter().map(|p| *p as usize).sum()
    }

    pub fn cells(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.parts
            .iter()
            .enumerate()
            .flat_map(|(r, len)| (0..*len).map(move |c| (r as u32, c)))
    }

    /// Cells to the right of `(r, c)` in its row.
    pub fn arm(&self, r: u32, c: u32) -> u32 {
        self.parts[r as usize] - c - 1
    }

    /// Cells below `(r, c)` in its column.
    pub fn leg(&self, r: u32, c: u32) -> u32 {
        self.parts[r as usize + 1..].iter().take_while(|len| **len > c).count() as u32
    }
}

/// All partitions of `n`, in reverse lexicographic order.
pub fn partitions_of(n: usize) -> Vec<Partition> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition { parts: prefix.clone() });
            return;
        }
        for p in (1..=n.min(max)).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}
