//! Distributed index coding instances and server capacity profiles.
//!
//! An instance is written `(1|-),(2|3),(3|2)`: receiver `i` wants message `i`
//! and knows the messages listed after the bar.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::subset::{Subset, MAX_MESSAGES};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("malformed clause {index}: {reason}")]
    MalformedClause { index: usize, reason: String },
    #[error("receiver {receiver} lists its own message as side information")]
    SelfSideInformation { receiver: usize },
    #[error("index {index} in clause {receiver} is outside 1..={n}")]
    IndexOutOfRange {
        receiver: usize,
        index: usize,
        n: usize,
    },
}

/// One index coding instance: `n` messages, receiver `i` demands `x_i` and
/// knows `x(A_i)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Problem {
    side_info: Vec<Subset>,
}

impl Problem {
    /// Builds an instance from 0-based side-information sets.
    ///
    /// Panics if an invariant is broken; use [`Problem::try_new`] for
    /// untrusted input.
    pub fn new(side_info: Vec<Subset>) -> Self {
        Self::try_new(side_info).expect("invalid side information")
    }

    pub fn try_new(side_info: Vec<Subset>) -> Result<Self, ParseError> {
        let n = side_info.len();
        if n == 0 || n > MAX_MESSAGES {
            return Err(ParseError::MalformedClause {
                index: 0,
                reason: format!("message count must be in 1..={MAX_MESSAGES}"),
            });
        }
        let full = Subset::full(n);
        for (i, a) in side_info.iter().enumerate() {
            if a.contains(i) {
                return Err(ParseError::SelfSideInformation { receiver: i + 1 });
            }
            if let Some(bad) = a.difference(full).iter().next() {
                return Err(ParseError::IndexOutOfRange {
                    receiver: i + 1,
                    index: bad + 1,
                    n,
                });
            }
        }
        Ok(Problem { side_info })
    }

    /// `(1|-),(2|-),...,(n|-)`.
    pub fn without_side_information(n: usize) -> Self {
        Problem::new(vec![Subset::EMPTY; n])
    }

    pub fn n(&self) -> usize {
        self.side_info.len()
    }

    pub fn side_info(&self, i: usize) -> Subset {
        self.side_info[i]
    }

    pub fn side_info_sets(&self) -> &[Subset] {
        &self.side_info
    }

    /// Interfering set `B_i = [n] \ (A_i ∪ {i})`.
    pub fn interference(&self, i: usize) -> Subset {
        Subset::full(self.n())
            .difference(self.side_info[i])
            .without(i)
    }

    /// Relabel messages so that message `i` becomes `perm[i]`; receivers and
    /// side information move together.
    pub fn permuted(&self, perm: &[usize]) -> Problem {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let mut side_info = vec![Subset::EMPTY; n];
        for (i, a) in self.side_info.iter().enumerate() {
            side_info[perm[i]] = a.permute(perm);
        }
        Problem { side_info }
    }

    /// Lexicographically least relabeling (comparing the side-information masks
    /// receiver by receiver) over all `n!` permutations.
    pub fn canonical_form(&self) -> Problem {
        let n = self.n();
        let mut best = self.side_info.clone();
        let mut candidate = vec![Subset::EMPTY; n];
        for_each_permutation(n, |perm| {
            for (i, a) in self.side_info.iter().enumerate() {
                candidate[perm[i]] = a.permute(perm);
            }
            if candidate < best {
                best.clone_from(&candidate);
            }
        });
        Problem { side_info: best }
    }

    pub fn is_isomorphic_to(&self, other: &Problem) -> bool {
        self.n() == other.n() && self.canonical_form() == other.canonical_form()
    }
}

/// Heap's algorithm; calls `f` once per permutation of `0..n`.
pub(crate) fn for_each_permutation<F: FnMut(&[usize])>(n: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&perm);
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// One representative per isomorphism class of `n`-message instances, each in
/// canonical form, sorted ascending.
pub fn enumerate_nonisomorphic(n: usize) -> Vec<Problem> {
    assert!((1..=MAX_MESSAGES).contains(&n));
    let per_receiver: Vec<Vec<Subset>> = (0..n)
        .map(|i| Subset::full(n).without(i).subsets().collect())
        .collect();
    let mut classes = BTreeSet::new();
    let mut choice = vec![0usize; n];
    loop {
        let side_info = (0..n).map(|i| per_receiver[i][choice[i]]).collect();
        let p = Problem { side_info };
        let canon = p.canonical_form();
        // An instance not already canonical has its class visited elsewhere.
        if canon == p {
            classes.insert(canon);
        }
        // odometer over the product space
        let mut k = 0;
        loop {
            if k == n {
                return classes.into_iter().collect();
            }
            choice[k] += 1;
            if choice[k] < per_receiver[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Problem({self})")
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.side_info.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({}|", i + 1)?;
            if a.is_empty() {
                f.write_str("-")?;
            } else {
                for (k, j) in a.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{}", j + 1)?;
                }
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl FromStr for Problem {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_problem(s)
    }
}

/// Parses the compact clause notation. Whitespace anywhere is ignored.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut clauses = Vec::new();
    let mut rest = compact.as_str();
    while !rest.is_empty() {
        let index = clauses.len() + 1;
        let malformed = |reason: &str| ParseError::MalformedClause {
            index,
            reason: reason.to_string(),
        };
        let body = rest
            .strip_prefix('(')
            .ok_or_else(|| malformed("expected '('"))?;
        let close = body.find(')').ok_or_else(|| malformed("missing ')'"))?;
        clauses.push(&body[..close]);
        rest = &body[close + 1..];
        if let Some(next) = rest.strip_prefix(',') {
            if next.is_empty() {
                return Err(malformed("trailing ','"));
            }
            rest = next;
        } else if !rest.is_empty() {
            return Err(malformed("expected ',' between clauses"));
        }
    }
    if clauses.is_empty() {
        return Err(ParseError::MalformedClause {
            index: 0,
            reason: "no clauses".into(),
        });
    }
    let n = clauses.len();
    if n > MAX_MESSAGES {
        return Err(ParseError::MalformedClause {
            index: n,
            reason: format!("at most {MAX_MESSAGES} messages supported"),
        });
    }

    let mut side_info = Vec::with_capacity(n);
    for (pos, clause) in clauses.iter().enumerate() {
        let receiver = pos + 1;
        let malformed = |reason: String| ParseError::MalformedClause {
            index: receiver,
            reason,
        };
        let (head, list) = clause
            .split_once('|')
            .ok_or_else(|| malformed("missing '|'".into()))?;
        let head: usize = head
            .parse()
            .map_err(|_| malformed(format!("bad receiver index {head:?}")))?;
        if head != receiver {
            return Err(malformed(format!(
                "clauses must be numbered in order; expected {receiver}, found {head}"
            )));
        }
        let mut a = Subset::EMPTY;
        if list != "-" {
            for item in list.split(',') {
                let j: usize = item
                    .parse()
                    .map_err(|_| malformed(format!("bad index {item:?}")))?;
                if j == 0 || j > n {
                    return Err(ParseError::IndexOutOfRange {
                        receiver,
                        index: j,
                        n,
                    });
                }
                if j == receiver {
                    return Err(ParseError::SelfSideInformation { receiver });
                }
                if a.contains(j - 1) {
                    return Err(malformed(format!("duplicate index {j}")));
                }
                a = a.with(j - 1);
            }
        }
        side_info.push(a);
    }
    Ok(Problem { side_info })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CapacityError {
    #[error("capacity profile for n={n} needs {expected} entries, got {got}")]
    WrongLength {
        n: usize,
        expected: usize,
        got: usize,
    },
    #[error("capacity of server {server} is negative")]
    Negative { server: Subset },
    #[error("server mask {mask} is not a nonempty subset of [{n}]")]
    BadServer { mask: u32, n: usize },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
}

/// Link capacities `C_J` for every server `J ∈ N`, stored exactly.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CapacityProfile {
    n: usize,
    /// Indexed by `mask - 1`.
    capacities: Vec<Rational64>,
}

impl CapacityProfile {
    pub fn new(n: usize, capacities: Vec<Rational64>) -> Result<Self, CapacityError> {
        let expected = (1usize << n) - 1;
        if capacities.len() != expected {
            return Err(CapacityError::WrongLength {
                n,
                expected,
                got: capacities.len(),
            });
        }
        if let Some(k) = capacities.iter().position(|c| *c < Rational64::zero()) {
            return Err(CapacityError::Negative {
                server: Subset::from_mask(k as u32 + 1),
            });
        }
        Ok(CapacityProfile { n, capacities })
    }

    /// `C_J = c` for every nonempty `J`.
    pub fn uniform(n: usize, c: Rational64) -> Self {
        Self::new(n, vec![c; (1 << n) - 1]).expect("uniform capacity must be nonnegative")
    }

    /// Single server holding everything: `C_[n] = c`, all others zero.
    pub fn centralized(n: usize, c: Rational64) -> Self {
        let mut caps = vec![Rational64::zero(); (1 << n) - 1];
        caps[(1 << n) - 2] = c;
        Self::new(n, caps).expect("centralized capacity must be nonnegative")
    }

    /// Parses `J_mask=value` lines; unlisted servers get capacity zero. Blank
    /// lines and `#` comments are skipped. Values may be integers, fractions
    /// (`3/2`) or decimals (`0.25`).
    pub fn parse(n: usize, text: &str) -> Result<Self, CapacityError> {
        let mut caps = vec![Rational64::zero(); (1 << n) - 1];
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |reason: String| CapacityError::Syntax {
                line: k + 1,
                reason,
            };
            let (mask, value) = line
                .split_once('=')
                .ok_or_else(|| syntax("expected J_mask=value".into()))?;
            let mask: u32 = mask
                .trim()
                .parse()
                .map_err(|_| syntax(format!("bad mask {mask:?}")))?;
            if mask == 0 || mask >= 1 << n {
                return Err(CapacityError::BadServer { mask, n });
            }
            caps[mask as usize - 1] = parse_rational(value.trim()).map_err(syntax)?;
        }
        Self::new(n, caps)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, server: Subset) -> Rational64 {
        self.capacities[server.mask() as usize - 1]
    }

    pub fn get_f64(&self, server: Subset) -> f64 {
        self.get(server).to_f64().unwrap_or(f64::NAN)
    }

    /// `(J, C_J)` for every server, ascending by mask.
    pub fn iter(&self) -> impl Iterator<Item = (Subset, Rational64)> + '_ {
        self.capacities
            .iter()
            .enumerate()
            .map(|(k, c)| (Subset::from_mask(k as u32 + 1), *c))
    }

    pub fn total(&self) -> Rational64 {
        self.capacities.iter().copied().sum()
    }

    pub fn scaled(&self, factor: Rational64) -> CapacityProfile {
        CapacityProfile {
            n: self.n,
            capacities: self.capacities.iter().map(|c| c * factor).collect(),
        }
    }

    /// Relabel servers consistently with a message permutation.
    pub fn permuted(&self, perm: &[usize]) -> CapacityProfile {
        let mut caps = vec![Rational64::zero(); self.capacities.len()];
        for (j, c) in self.iter() {
            caps[j.permute(perm).mask() as usize - 1] = c;
        }
        CapacityProfile {
            n: self.n,
            capacities: caps,
        }
    }
}

impl fmt::Debug for CapacityProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.iter().map(|(j, c)| (j, c.to_string())))
            .finish()
    }
}

/// `"7"`, `"3/2"`, `"0.25"` → exact rational.
pub fn parse_rational(s: &str) -> Result<Rational64, String> {
    let bad = || format!("bad number {s:?}");
    if let Some((num, den)) = s.split_once('/') {
        let num: i64 = num.trim().parse().map_err(|_| bad())?;
        let den: i64 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: i64 = if int.is_empty() || int == "-" {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let scale = 10i64.pow(frac.len() as u32);
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        let frac = if negative { -frac } else { frac };
        return Ok(Rational64::new(int * scale + frac, scale));
    }
    s.parse::<i64>().map(Rational64::from).map_err(|_| bad())
}
