//! Finite groups given by multiplication tables.

use std::io::Read;

use super::GroupError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    table: Vec<Vec<u32>>,
    identity: u32,
    inverses: Vec<u32>,
}

impl FiniteGroup {
    /// Validates a Cayley table: Latin square, two-sided identity and
    /// associativity (exhaustive up to order 64, a fixed stride beyond).
    pub fn from_table(table: Vec<Vec<u32>>) -> Result<Self, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::InvalidTable("empty table".into()));
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(GroupError::InvalidTable(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for &x in row {
                if x as usize >= n || std::mem::replace(&mut seen[x as usize], true) {
                    return Err(GroupError::InvalidTable(format!("row {i} is not a permutation")));
                }
            }
        }
        for j in 0..n {
            let mut seen = vec![false; n];
            for row in &table {
                if std::mem::replace(&mut seen[row[j] as usize], true) {
                    return Err(GroupError::InvalidTable(format!("column {j} is not a permutation")));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] as usize == x && table[x][e] as usize == x))
            .ok_or_else(|| GroupError::InvalidTable("no identity element".into()))? as u32;
        let stride = if n <= 64 { 1 } else { n / 37 + 1 };
        for a in (0..n).step_by(stride) {
            for b in (0..n).step_by(stride) {
                for c in (0..n).step_by(stride) {
                    let l = table[table[a][b] as usize][c];
                    let r = table[a][table[b][c] as usize];
                    if l != r {
                        return Err(GroupError::InvalidTable(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|a| table[a].iter().position(|&x| x == identity).expect("latin row") as u32)
            .collect();
        Ok(FiniteGroup {
            table,
            identity,
            inverses,
        })
    }

    /// Reads a headerless CSV of integer rows.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, GroupError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let mut table = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|e| GroupError::InvalidTable(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| s.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| GroupError::InvalidTable(e.to_string()))?;
            table.push(row);
        }
        Self::from_table(table)
    }

    /// `ℤ/n`.
    pub fn cyclic(n: u32) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(table).expect("cyclic table is valid")
    }

    /// Dihedral group of order `2n`; element `k + n s` is `r^k f^s`.
    pub fn dihedral(n: u32) -> Self {
        let m = 2 * n;
        let table = (0..m)
            .map(|x| {
                let (k1, s1) = (x % n, x / n);
                (0..m)
                    .map(|y| {
                        let (k2, s2) = (y % n, y / n);
                        // r^k1 f^s1 r^k2 f^s2 = r^(k1 ± k2) f^(s1+s2)
                        let k = if s1 == 0 { (k1 + k2) % n } else { (k1 + n - k2) % n };
                        k + n * ((s1 + s2) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("dihedral table is valid")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn multiply(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize][b as usize]
    }

    #[inline]
    pub fn inverse(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn table(&self) -> &[Vec<u32>] {
        &self.table
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dihedral_is_nonabelian() {
        let d = FiniteGroup::dihedral(3);
        assert_eq!(d.order(), 6);
        assert_ne!(d.multiply(1, 3), d.multiply(3, 1));
        for a in 0..6 {
            assert_eq!(d.multiply(a, d.inverse(a)), d.identity());
        }
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![0, 1]]).is_err());
        // Latin square without an identity
        assert!(FiniteGroup::from_table(vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]]).is_err());
        // quasigroup with identity but not associative
        let loop5 = vec![
            vec![0, 1, 2, 3, 4],
            vec![1, 0, 3, 4, 2],
            vec![2, 4, 0, 1, 3],
            vec![3, 2, 4, 0, 1],
            vec![4, 3, 1, 2, 0],
        ];
        assert!(matches!(
            FiniteGroup::from_table(loop5),
            Err(GroupError::InvalidTable(_))
        ));
    }

    #[test]
    fn csv_round_trip() {
        let text = "0,1,2\n1,2,0\n2,0,1\n";
        let g = FiniteGroup::from_csv(text.as_bytes()).unwrap();
        assert_eq!(g, FiniteGroup::cyclic(3));
        assert!(FiniteGroup::from_csv("0,x\n".as_bytes()).is_err());
    }
}
