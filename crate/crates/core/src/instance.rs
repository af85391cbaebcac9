//! Instance model and the line-based text format.
//!
//! Participants are referred to by index internally; names are kept only for
//! parsing and reporting. Declaration order is the order of the index.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// A resident/hospital pair, by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Match {
    pub r: usize,
    pub h: usize,
}

impl Match {
    pub fn new(r: usize, h: usize) -> Self {
        Match { r, h }
    }
}

pub type MatchSet = BTreeSet<Match>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("duplicate resident `{0}`")]
    DuplicateResident(String),
    #[error("duplicate hospital `{0}`")]
    DuplicateHospital(String),
    #[error("hospital `{0}` has quota 0")]
    ZeroQuota(String),
    #[error("`{0}` appears twice in the list of `{1}`")]
    DuplicateEntry(String, String),
    #[error("list of `{0}` refers to index {1}, which is out of range")]
    BadIndex(String, usize),
}

/// Residents, hospitals, quotas and truncated strict preference lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    residents: Vec<String>,
    hospitals: Vec<String>,
    quota: Vec<usize>,
    rlist: Vec<Vec<usize>>,
    hlist: Vec<Vec<usize>>,
    rindex: HashMap<String, usize>,
    hindex: HashMap<String, usize>,
}

impl Instance {
    /// Builds an instance from index-based lists, checking every invariant.
    pub fn from_parts(
        residents: Vec<String>,
        hospitals: Vec<String>,
        quota: Vec<usize>,
        rlist: Vec<Vec<usize>>,
        hlist: Vec<Vec<usize>>,
    ) -> Result<Self, InstanceError> {
        assert_eq!(quota.len(), hospitals.len(), "one quota per hospital");
        assert_eq!(rlist.len(), residents.len(), "one list per resident");
        assert_eq!(hlist.len(), hospitals.len(), "one list per hospital");
        let mut rindex = HashMap::new();
        for (i, r) in residents.iter().enumerate() {
            if rindex.insert(r.clone(), i).is_some() {
                return Err(InstanceError::DuplicateResident(r.clone()));
            }
        }
        let mut hindex = HashMap::new();
        for (i, h) in hospitals.iter().enumerate() {
            if hindex.insert(h.clone(), i).is_some() {
                return Err(InstanceError::DuplicateHospital(h.clone()));
            }
            if quota[i] == 0 {
                return Err(InstanceError::ZeroQuota(h.clone()));
            }
        }
        for (r, list) in rlist.iter().enumerate() {
            check_list(list, hospitals.len(), &residents[r], &hospitals)?;
        }
        for (h, list) in hlist.iter().enumerate() {
            check_list(list, residents.len(), &hospitals[h], &residents)?;
        }
        Ok(Instance { residents, hospitals, quota, rlist, hlist, rindex, hindex })
    }

    /// Convenience constructor from names: `(hospital, quota, list)` and `(resident, list)`.
    ///
    /// Panics on unknown names; meant for fixtures and tests.
    pub fn from_names(hospitals: &[(&str, usize, &[&str])], residents: &[(&str, &[&str])]) -> Self {
        let rnames: Vec<String> = residents.iter().map(|r| r.0.to_string()).collect();
        let hnames: Vec<String> = hospitals.iter().map(|h| h.0.to_string()).collect();
        let rpos = |n: &str| rnames.iter().position(|x| x == n).unwrap_or_else(|| panic!("unknown resident {n}"));
        let hpos = |n: &str| hnames.iter().position(|x| x == n).unwrap_or_else(|| panic!("unknown hospital {n}"));
        let quota = hospitals.iter().map(|h| h.1).collect();
        let hlist = hospitals.iter().map(|h| h.2.iter().map(|r| rpos(r)).collect()).collect();
        let rlist = residents.iter().map(|r| r.1.iter().map(|h| hpos(h)).collect()).collect();
        Instance::from_parts(rnames, hnames, quota, rlist, hlist).expect("valid fixture")
    }

    pub fn n_residents(&self) -> usize {
        self.residents.len()
    }

    pub fn n_hospitals(&self) -> usize {
        self.hospitals.len()
    }

    pub fn resident_name(&self, r: usize) -> &str {
        &self.residents[r]
    }

    pub fn hospital_name(&self, h: usize) -> &str {
        &self.hospitals[h]
    }

    pub fn residents(&self) -> &[String] {
        &self.residents
    }

    pub fn hospitals(&self) -> &[String] {
        &self.hospitals
    }

    pub fn resident(&self, name: &str) -> Option<usize> {
        self.rindex.get(name).copied()
    }

    pub fn hospital(&self, name: &str) -> Option<usize> {
        self.hindex.get(name).copied()
    }

    /// Looks up a match by names.
    pub fn find_match(&self, r: &str, h: &str) -> Option<Match> {
        Some(Match::new(self.resident(r)?, self.hospital(h)?))
    }

    /// Match by names; panics on unknown names.
    pub fn m(&self, r: &str, h: &str) -> Match {
        self.find_match(r, h).unwrap_or_else(|| panic!("unknown match ({r},{h})"))
    }

    pub fn quota(&self, h: usize) -> usize {
        self.quota[h]
    }

    pub fn quotas(&self) -> &[usize] {
        &self.quota
    }

    /// λ_r, most preferred first.
    pub fn resident_list(&self, r: usize) -> &[usize] {
        &self.rlist[r]
    }

    /// π_h, most preferred first.
    pub fn hospital_list(&self, h: usize) -> &[usize] {
        &self.hlist[h]
    }

    /// Position of `r` in π_h, if listed.
    pub fn rank(&self, h: usize, r: usize) -> Option<usize> {
        self.hlist[h].iter().position(|&x| x == r)
    }

    pub fn is_listed(&self, h: usize, r: usize) -> bool {
        self.hlist[h].contains(&r)
    }

    pub fn is_hospital_complete(&self) -> bool {
        self.hlist.iter().all(|l| l.len() == self.residents.len())
    }

    pub fn is_resident_complete(&self) -> bool {
        self.rlist.iter().all(|l| l.len() == self.hospitals.len())
    }

    pub fn is_complete(&self) -> bool {
        self.is_hospital_complete() && self.is_resident_complete()
    }

    /// Stable marriage case: every quota is one.
    pub fn is_marriage(&self) -> bool {
        self.quota.iter().all(|&q| q == 1)
    }

    /// Appends `h` to λ_r. Panics if already listed.
    pub fn push_resident_pref(&mut self, r: usize, h: usize) {
        assert!(!self.rlist[r].contains(&h), "duplicate entry");
        self.rlist[r].push(h);
    }

    /// Appends `r` to π_h. Panics if already listed.
    pub fn push_hospital_pref(&mut self, h: usize, r: usize) {
        assert!(!self.hlist[h].contains(&r), "duplicate entry");
        self.hlist[h].push(r);
    }

    /// Inserts `r` into π_h at position `pos`. Panics if already listed.
    pub fn insert_hospital_pref(&mut self, h: usize, pos: usize, r: usize) {
        assert!(!self.hlist[h].contains(&r), "duplicate entry");
        self.hlist[h].insert(pos, r);
    }

    /// Cuts λ_r to its first `len` entries.
    pub fn truncate_resident_list(&mut self, r: usize, len: usize) {
        self.rlist[r].truncate(len);
    }

    /// Cuts π_h to its first `len` entries.
    pub fn truncate_hospital_list(&mut self, h: usize, len: usize) {
        self.hlist[h].truncate(len);
    }

    /// Replaces π_h; the new list must be strict.
    pub fn set_hospital_list(&mut self, h: usize, list: Vec<usize>) -> Result<(), InstanceError> {
        check_list(&list, self.residents.len(), &self.hospitals[h], &self.residents)?;
        self.hlist[h] = list;
        Ok(())
    }

    /// Replaces λ_r; the new list must be strict.
    pub fn set_resident_list(&mut self, r: usize, list: Vec<usize>) -> Result<(), InstanceError> {
        check_list(&list, self.hospitals.len(), &self.residents[r], &self.hospitals)?;
        self.rlist[r] = list;
        Ok(())
    }

    /// True when every list of `self` is a prefix of the matching list in `other`
    /// and both share participants and quotas.
    pub fn is_extended_by(&self, other: &Instance) -> bool {
        self.residents == other.residents
            && self.hospitals == other.hospitals
            && self.quota == other.quota
            && self.rlist.iter().zip(&other.rlist).all(|(a, b)| b.starts_with(a))
            && self.hlist.iter().zip(&other.hlist).all(|(a, b)| b.starts_with(a))
    }

    pub fn fmt_match(&self, m: Match) -> String {
        format!("({},{})", self.residents[m.r], self.hospitals[m.h])
    }

    /// Matches as `[resident, hospital]` name pairs, sorted lexicographically.
    pub fn named_pairs<'a>(&self, set: impl IntoIterator<Item = &'a Match>) -> Vec<[String; 2]> {
        let mut v: Vec<[String; 2]> = set
            .into_iter()
            .map(|m| [self.residents[m.r].clone(), self.hospitals[m.h].clone()])
            .collect();
        v.sort();
        v
    }

    pub fn fmt_set<'a>(&self, set: impl IntoIterator<Item = &'a Match>) -> String {
        let pairs = self.named_pairs(set);
        let parts: Vec<String> = pairs.iter().map(|[r, h]| format!("({r},{h})")).collect();
        format!("{{{}}}", parts.join(", "))
    }

    /// Text form, optionally with a query line.
    pub fn to_text(&self, query: Option<Match>) -> String {
        let mut s = self.to_string();
        if let Some(m) = query {
            s.push_str(&format!("query {} {}\n", self.residents[m.r], self.hospitals[m.h]));
        }
        s
    }
}

fn check_list(list: &[usize], bound: usize, owner: &str, names: &[String]) -> Result<(), InstanceError> {
    let mut seen = vec![false; bound];
    for &x in list {
        if x >= bound {
            return Err(InstanceError::BadIndex(owner.to_string(), x));
        }
        if seen[x] {
            return Err(InstanceError::DuplicateEntry(names[x].clone(), owner.to_string()));
        }
        seen[x] = true;
    }
    Ok(())
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (h, name) in self.hospitals.iter().enumerate() {
            write!(f, "hospital {} {} :", name, self.quota[h])?;
            for &r in &self.hlist[h] {
                write!(f, " {}", self.residents[r])?;
            }
            writeln!(f)?;
        }
        for (r, name) in self.residents.iter().enumerate() {
            write!(f, "resident {} :", name)?;
            for &h in &self.rlist[r] {
                write!(f, " {}", self.hospitals[h])?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("unknown identifier `{0}`")]
    Unknown(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("`{0}` listed twice")]
    DuplicateEntry(String),
    #[error("quota must be at least 1")]
    ZeroQuota,
    #[error("more than one query line")]
    SecondQuery,
}

/// A parsed instance file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parsed {
    pub instance: Instance,
    pub query: Option<Match>,
}

struct RawLine<'a> {
    line: usize,
    name: &'a str,
    quota: usize,
    list: Vec<&'a str>,
}

/// Parses the line format.
///
/// Lines may appear in any order: all `hospital`/`resident` declarations are
/// collected before list entries and the query are resolved.
pub fn parse_instance(text: &str) -> Result<Parsed, ParseError> {
    let err = |line, kind| ParseError { line, kind };
    let mut hs: Vec<RawLine> = Vec::new();
    let mut rs: Vec<RawLine> = Vec::new();
    let mut query: Option<(usize, &str, &str)> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = content.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        match toks[0] {
            "hospital" => {
                if toks.len() < 4 || toks[3] != ":" {
                    return Err(err(line, ParseErrorKind::Malformed("expected `hospital <id> <quota> : ...`".into())));
                }
                let quota: usize = toks[2]
                    .parse()
                    .map_err(|_| err(line, ParseErrorKind::Malformed(format!("bad quota `{}`", toks[2]))))?;
                if quota == 0 {
                    return Err(err(line, ParseErrorKind::ZeroQuota));
                }
                hs.push(RawLine { line, name: toks[1], quota, list: toks[4..].to_vec() });
            }
            "resident" => {
                if toks.len() < 3 || toks[2] != ":" {
                    return Err(err(line, ParseErrorKind::Malformed("expected `resident <id> : ...`".into())));
                }
                rs.push(RawLine { line, name: toks[1], quota: 0, list: toks[3..].to_vec() });
            }
            "query" => {
                if toks.len() != 3 {
                    return Err(err(line, ParseErrorKind::Malformed("expected `query <resident> <hospital>`".into())));
                }
                if query.is_some() {
                    return Err(err(line, ParseErrorKind::SecondQuery));
                }
                query = Some((line, toks[1], toks[2]));
            }
            other => return Err(err(line, ParseErrorKind::Malformed(format!("unknown keyword `{other}`")))),
        }
    }
    let mut hindex: HashMap<&str, usize> = HashMap::new();
    for (i, h) in hs.iter().enumerate() {
        if hindex.insert(h.name, i).is_some() {
            return Err(err(h.line, ParseErrorKind::DuplicateDeclaration(h.name.into())));
        }
    }
    let mut rindex: HashMap<&str, usize> = HashMap::new();
    for (i, r) in rs.iter().enumerate() {
        if rindex.insert(r.name, i).is_some() {
            return Err(err(r.line, ParseErrorKind::DuplicateDeclaration(r.name.into())));
        }
    }
    let resolve = |raw: &RawLine, index: &HashMap<&str, usize>| -> Result<Vec<usize>, ParseError> {
        let mut out = Vec::with_capacity(raw.list.len());
        for tok in &raw.list {
            let id = *index.get(tok).ok_or_else(|| err(raw.line, ParseErrorKind::Unknown(tok.to_string())))?;
            if out.contains(&id) {
                return Err(err(raw.line, ParseErrorKind::DuplicateEntry(tok.to_string())));
            }
            out.push(id);
        }
        Ok(out)
    };
    let hlist = hs.iter().map(|h| resolve(h, &rindex)).collect::<Result<Vec<_>, _>>()?;
    let rlist = rs.iter().map(|r| resolve(r, &hindex)).collect::<Result<Vec<_>, _>>()?;
    let query = match query {
        None => None,
        Some((line, r, h)) => {
            let ri = *rindex.get(r).ok_or_else(|| err(line, ParseErrorKind::Unknown(r.into())))?;
            let hi = *hindex.get(h).ok_or_else(|| err(line, ParseErrorKind::Unknown(h.into())))?;
            Some(Match::new(ri, hi))
        }
    };
    let instance = Instance::from_parts(
        rs.iter().map(|r| r.name.to_string()).collect(),
        hs.iter().map(|h| h.name.to_string()).collect(),
        hs.iter().map(|h| h.quota).collect(),
        rlist,
        hlist,
    )
    .expect("checked during parsing");
    Ok(Parsed { instance, query })
}

/// The instance of the safe-set worked example: three hospitals X, Y, Z of
/// quota 3 and nine residents a–i.
pub fn nine_residents() -> Instance {
    Instance::from_names(
        &[
            ("X", 3, &["a", "i", "e", "c", "b", "f", "d"]),
            ("Y", 3, &["i", "g", "a", "b", "d", "e", "c"]),
            ("Z", 3, &["e", "b", "g", "a", "i", "d"]),
        ],
        &[
            ("a", &["X"]),
            ("b", &["Y", "X"]),
            ("c", &["Y", "X"]),
            ("d", &["X"]),
            ("e", &["Y", "X"]),
            ("f", &["Y", "X"]),
            ("g", &["X", "Y"]),
            ("h", &["Y"]),
            ("i", &["Z"]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let t = nine_residents();
        let text = t.to_text(Some(t.m("e", "Y")));
        let p = parse_instance(&text).unwrap();
        assert_eq!(p.instance, t);
        assert_eq!(p.query, Some(t.m("e", "Y")));
        assert_eq!(t.n_residents(), 9);
        assert_eq!(t.n_hospitals(), 3);
        assert!(t.quotas().iter().all(|&q| q == 3));
    }

    #[test]
    fn empty_input() {
        let p = parse_instance("").unwrap();
        assert_eq!(p.instance.n_residents(), 0);
        assert_eq!(p.instance.n_hospitals(), 0);
        assert_eq!(p.query, None);
    }

    #[test]
    fn zero_quota_rejected() {
        let e = parse_instance("hospital X 0 :").unwrap_err();
        assert_eq!(e, ParseError { line: 1, kind: ParseErrorKind::ZeroQuota });
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "# comment\nhospital X 1 : a\nresident a : X Y\n";
        let e = parse_instance(text).unwrap_err();
        assert_eq!(e.line, 3);
        assert_eq!(e.kind, ParseErrorKind::Unknown("Y".into()));

        let e = parse_instance("hospital X 1 : a a\nresident a : X").unwrap_err();
        assert_eq!(e, ParseError { line: 1, kind: ParseErrorKind::DuplicateEntry("a".into()) });

        let e = parse_instance("resident a :\nresident a :").unwrap_err();
        assert_eq!(e.line, 2);

        let e = parse_instance("hospital X 1 a").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Malformed(_)));

        let e = parse_instance("resident a :\nhospital X 1 :\nquery a X\nquery a X").unwrap_err();
        assert_eq!(e, ParseError { line: 4, kind: ParseErrorKind::SecondQuery });
    }

    #[test]
    fn order_independent_and_comments() {
        let a = parse_instance("resident r : h # trailing\nhospital h 1 : r\n").unwrap();
        let b = parse_instance("hospital h 1 : r\nresident r : h\n").unwrap();
        assert_eq!(a, b);
    }
}
