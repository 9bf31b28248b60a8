//! Finite groups as validated Cayley tables.
//!
//! Elements are dense indices `0..order`; index 0 is always the identity.
//! Haar integration over the group is the averaged counting measure
//! `(1/|G|) Σ_s`, which every other module relies on.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{AxiomViolation, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    /// Row-major: `table[s * order + t]` is the index of `s·t`.
    table: Vec<usize>,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates a row-major Cayley table and normalizes the identity to index 0.
    pub fn from_table(order: usize, table: Vec<usize>) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("group order must be positive".into()));
        }
        if table.len() != order * order {
            return Err(Error::DimensionMismatch(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        for (k, &v) in table.iter().enumerate() {
            if v >= order {
                return Err(Error::NotAGroup(AxiomViolation::Closure {
                    row: k / order,
                    col: k % order,
                    value: v,
                }));
            }
        }
        let at = |s: usize, t: usize| table[s * order + t];
        let identity = (0..order)
            .find(|&e| (0..order).all(|s| at(e, s) == s && at(s, e) == s))
            .ok_or(Error::NotAGroup(AxiomViolation::NoIdentity))?;

        // Relabel so the identity becomes 0: swap labels 0 and `identity`.
        let relabel = |x: usize| {
            if x == identity {
                0
            } else if x == 0 {
                identity
            } else {
                x
            }
        };
        let mut normalized = vec![0; order * order];
        for s in 0..order {
            for t in 0..order {
                normalized[relabel(s) * order + relabel(t)] = relabel(at(s, t));
            }
        }
        let at = |s: usize, t: usize| normalized[s * order + t];

        let inverse = (0..order)
            .map(|s| {
                (0..order)
                    .find(|&t| at(s, t) == 0 && at(t, s) == 0)
                    .ok_or(Error::NotAGroup(AxiomViolation::NoInverse {
                        element: relabel(s),
                    }))
            })
            .collect::<Result<Vec<_>>>()?;
        for a in 0..order {
            for b in 0..order {
                let ab = at(a, b);
                for c in 0..order {
                    if at(ab, c) != at(a, at(b, c)) {
                        return Err(Error::NotAGroup(AxiomViolation::Associativity {
                            a: relabel(a),
                            b: relabel(b),
                            c: relabel(c),
                        }));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            order,
            table: normalized,
            inverse,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    #[inline]
    pub fn mul(&self, s: usize, t: usize) -> usize {
        self.table[s * self.order + t]
    }

    #[inline]
    pub fn inv(&self, s: usize) -> usize {
        self.inverse[s]
    }

    pub fn inverses(&self) -> &[usize] {
        &self.inverse
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|s| (0..s).all(|t| self.mul(s, t) == self.mul(t, s)))
    }

    /// Smallest `k ≥ 1` with `s^k = e`.
    pub fn element_order(&self, s: usize) -> usize {
        let mut x = s;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, s);
            k += 1;
        }
        k
    }

    /// Number of conjugacy classes, which equals the number of irreducible
    /// representations.
    pub fn class_count(&self) -> usize {
        let mut seen = vec![false; self.order];
        let mut classes = 0;
        for s in 0..self.order {
            if seen[s] {
                continue;
            }
            classes += 1;
            for g in 0..self.order {
                seen[self.mul(self.mul(g, s), self.inv(g))] = true;
            }
        }
        classes
    }

    /// Cyclic group `Z_n` with `i·j = (i + j) mod n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("cyclic group needs n >= 1".into()));
        }
        let table = (0..n * n).map(|k| (k / n + k % n) % n).collect();
        Self::from_table(n, table)
    }

    /// Dihedral group of order `2n`; element `r^a f^b` has index `a + n·b`.
    pub fn dihedral(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument("dihedral group needs n >= 2".into()));
        }
        let order = 2 * n;
        let mut table = vec![0; order * order];
        for x in 0..order {
            let (a, b) = (x % n, x / n);
            for y in 0..order {
                let (c, d) = (y % n, y / n);
                // r^a f^b r^c f^d = r^(a ± c) f^(b + d)
                let rot = if b == 0 { (a + c) % n } else { (a + n - c) % n };
                table[x * order + y] = rot + n * ((b + d) % 2);
            }
        }
        Self::from_table(order, table)
    }

    pub fn klein_four() -> Self {
        Self::dihedral(2).expect("klein four group")
    }

    /// Quaternion group; index `u + 4·neg` for unit `u ∈ {1, i, j, k}`.
    pub fn quaternion8() -> Self {
        // unit products: (sign, unit) for units 1,i,j,k
        const UNIT: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        let mut table = vec![0; 64];
        for x in 0..8 {
            for y in 0..8 {
                let (neg, u) = UNIT[x % 4][y % 4];
                let sign = neg ^ (x >= 4) ^ (y >= 4);
                table[x * 8 + y] = u + if sign { 4 } else { 0 };
            }
        }
        Self::from_table(8, table).expect("quaternion group")
    }

    /// Symmetric group `S_k`, elements in lexicographic order of their
    /// one-line notation, composition `(σ·τ)(i) = σ(τ(i))`.
    pub fn symmetric(k: usize) -> Result<Self> {
        if !(2..=5).contains(&k) {
            return Err(Error::InvalidArgument(format!(
                "symmetric group degree must be in 2..=5, got {k}"
            )));
        }
        let perms = permutations(k);
        let index = |p: &[usize]| perms.binary_search_by(|q| q.as_slice().cmp(p)).unwrap();
        let order = perms.len();
        let mut table = vec![0; order * order];
        for (x, s) in perms.iter().enumerate() {
            for (y, t) in perms.iter().enumerate() {
                let st: Vec<usize> = t.iter().map(|&i| s[i]).collect();
                table[x * order + y] = index(&st);
            }
        }
        Self::from_table(order, table)
    }

    /// Direct product; `(g, h)` has index `g·|H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order, h.order);
        let order = m * n;
        let mut table = vec![0; order * order];
        for x in 0..order {
            for y in 0..order {
                table[x * order + y] = g.mul(x / n, y / n) * n + h.mul(x % n, y % n);
            }
        }
        Self::from_table(order, table).expect("direct product of groups")
    }

    /// Parses the Cayley text format: first line the order `n`, then `n`
    /// lines of `n` whitespace-separated indices. `#` starts a comment.
    pub fn parse_cayley(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, first) = lines.next().ok_or(Error::Syntax {
            line: 1,
            message: "missing group order".into(),
        })?;
        let order: usize = first.parse().map_err(|_| Error::Syntax {
            line: line_no,
            message: format!("expected the group order, found `{first}`"),
        })?;
        if order == 0 {
            return Err(Error::Syntax {
                line: line_no,
                message: "group order must be positive".into(),
            });
        }
        let mut table = Vec::with_capacity(order * order);
        for row in 0..order {
            let (line_no, line) = lines.next().ok_or(Error::Syntax {
                line: line_no + row + 1,
                message: format!("expected {order} table rows, found {row}"),
            })?;
            let entries = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<usize>().map_err(|_| Error::Syntax {
                        line: line_no,
                        message: format!("`{tok}` is not an element index"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            if entries.len() != order {
                return Err(Error::Syntax {
                    line: line_no,
                    message: format!("row has {} entries, expected {order}", entries.len()),
                });
            }
            table.extend(entries);
        }
        if let Some((line_no, _)) = lines.next() {
            return Err(Error::Syntax {
                line: line_no,
                message: "trailing content after the table".into(),
            });
        }
        Self::from_table(order, table)
    }

    pub fn to_cayley(&self) -> String {
        let mut out = format!("{}\n", self.order);
        for s in 0..self.order {
            let row: Vec<String> = (0..self.order).map(|t| self.mul(s, t).to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Scriptable group description: `cyclic:n`, `dihedral:n`, `s:n`, `q8`,
/// `klein4`, `product:<spec>,<spec>` or `file:<path>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupSpec {
    Cyclic(usize),
    Dihedral(usize),
    Symmetric(usize),
    Quaternion8,
    Klein4,
    Product(Box<GroupSpec>, Box<GroupSpec>),
    File(PathBuf),
}

impl GroupSpec {
    pub fn build(&self) -> Result<FiniteGroup> {
        match self {
            GroupSpec::Cyclic(n) => FiniteGroup::cyclic(*n),
            GroupSpec::Dihedral(n) => FiniteGroup::dihedral(*n),
            GroupSpec::Symmetric(k) => FiniteGroup::symmetric(*k),
            GroupSpec::Quaternion8 => Ok(FiniteGroup::quaternion8()),
            GroupSpec::Klein4 => Ok(FiniteGroup::klein_four()),
            GroupSpec::Product(a, b) => Ok(FiniteGroup::product(&a.build()?, &b.build()?)),
            GroupSpec::File(path) => FiniteGroup::parse_cayley(&std::fs::read_to_string(path)?),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |reason: &str| Error::GroupSpec {
            spec: s.to_string(),
            reason: reason.to_string(),
        };
        let s = s.trim();
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let number = |arg: Option<&str>| -> Result<usize> {
            arg.ok_or_else(|| bad("missing parameter"))?
                .parse()
                .map_err(|_| bad("parameter is not a positive integer"))
        };
        match head {
            "cyclic" | "z" => Ok(GroupSpec::Cyclic(number(arg)?)),
            "dihedral" | "d" => Ok(GroupSpec::Dihedral(number(arg)?)),
            "s" | "symmetric" => Ok(GroupSpec::Symmetric(number(arg)?)),
            "q8" if arg.is_none() => Ok(GroupSpec::Quaternion8),
            "klein4" if arg.is_none() => Ok(GroupSpec::Klein4),
            "file" => Ok(GroupSpec::File(PathBuf::from(
                arg.filter(|a| !a.is_empty()).ok_or_else(|| bad("missing path"))?,
            ))),
            "product" => {
                let rest = arg.ok_or_else(|| bad("missing factors"))?;
                // Nested specs may themselves contain commas; take the first
                // split where both halves parse.
                for (i, _) in rest.match_indices(',') {
                    if let (Ok(a), Ok(b)) = (rest[..i].parse(), rest[i + 1..].parse()) {
                        return Ok(GroupSpec::Product(Box::new(a), Box::new(b)));
                    }
                }
                Err(bad("expected product:<spec>,<spec>"))
            }
            _ => Err(bad("unknown group family")),
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic(n) => write!(f, "cyclic:{n}"),
            GroupSpec::Dihedral(n) => write!(f, "dihedral:{n}"),
            GroupSpec::Symmetric(k) => write!(f, "s:{k}"),
            GroupSpec::Quaternion8 => write!(f, "q8"),
            GroupSpec::Klein4 => write!(f, "klein4"),
            GroupSpec::Product(a, b) => write!(f, "product:{a},{b}"),
            GroupSpec::File(p) => write!(f, "file:{}", p.display()),
        }
    }
}
