//! Transaction database files: parsing, serialization and statistics.
//!
//! One transaction per line, items are unsigned decimal integers. The
//! delimiter follows the file extension: `.csv` uses commas, `.ssv` and any
//! other extension use single spaces.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::itemset::{Item, Itemset, Tid};
use crate::tidset::TidSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Delimiter {
    Space,
    Comma,
}

impl Delimiter {
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("csv") => Delimiter::Comma,
            _ => Delimiter::Space,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Delimiter::Space => ' ',
            Delimiter::Comma => ',',
        }
    }
}

/// An immutable set of transactions with a per-item inverted index.
///
/// Transaction `tid` (1-based) is stored at position `tid - 1`. Items of each
/// transaction are strictly ascending. Empty transactions are kept so tids
/// stay aligned with source lines.
#[derive(Clone)]
pub struct TransactionDatabase {
    transactions: Vec<Vec<Item>>,
    index: BTreeMap<Item, TidSet>,
    collapsed_duplicates: usize,
}

impl TransactionDatabase {
    /// Builds a database, canonicalizing each transaction (sort + dedup).
    pub fn from_transactions<I, T>(transactions: I) -> Self
    where
        I: IntoIterator<Item = T>,
        T: IntoIterator<Item = Item>,
    {
        let mut collapsed = 0;
        let transactions = transactions
            .into_iter()
            .map(|t| {
                let mut items: Vec<Item> = t.into_iter().collect();
                let before = items.len();
                items.sort_unstable();
                items.dedup();
                collapsed += before - items.len();
                items
            })
            .collect();
        let mut db = Self::from_canonical(transactions);
        db.collapsed_duplicates = collapsed;
        db
    }

    /// Builds a database from transactions that are already ascending and
    /// duplicate-free.
    pub(crate) fn from_canonical(transactions: Vec<Vec<Item>>) -> Self {
        let n = transactions.len();
        let mut lists: BTreeMap<Item, Vec<u32>> = BTreeMap::new();
        for (pos, items) in transactions.iter().enumerate() {
            debug_assert!(items.windows(2).all(|w| w[0] < w[1]));
            for &item in items {
                lists.entry(item).or_default().push(pos as u32);
            }
        }
        let index = lists
            .into_iter()
            .map(|(item, positions)| (item, TidSet::from_sorted(positions, n)))
            .collect();
        TransactionDatabase {
            transactions,
            index,
            collapsed_duplicates: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.transactions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.transactions.is_empty()
    }

    /// Items of transaction `tid`, or `None` if the tid is out of range.
    pub fn transaction(&self, tid: Tid) -> Option<&[Item]> {
        let pos = (tid as usize).checked_sub(1)?;
        self.transactions.get(pos).map(Vec::as_slice)
    }

    /// `(tid, items)` pairs in tid order.
    pub fn transactions(&self) -> impl ExactSizeIterator<Item = (Tid, &[Item])> {
        self.transactions
            .iter()
            .enumerate()
            .map(|(pos, items)| (pos as Tid + 1, items.as_slice()))
    }

    pub(crate) fn raw_transactions(&self) -> &[Vec<Item>] {
        &self.transactions
    }

    /// Distinct items, ascending.
    pub fn item_universe(&self) -> Vec<Item> {
        self.index.keys().copied().collect()
    }

    pub fn n_items(&self) -> usize {
        self.index.len()
    }

    /// Occurrence set of `item` (0-based positions), if the item occurs.
    pub fn tidset(&self, item: Item) -> Option<&TidSet> {
        self.index.get(&item)
    }

    /// Ascending 1-based tids of the transactions containing `item`.
    pub fn tidlist(&self, item: Item) -> Vec<Tid> {
        self.index
            .get(&item)
            .map(|s| s.iter().map(|p| p + 1).collect())
            .unwrap_or_default()
    }

    pub(crate) fn index(&self) -> &BTreeMap<Item, TidSet> {
        &self.index
    }

    /// Positions of transactions containing every item of `itemset`.
    pub fn supporting_positions(&self, itemset: &Itemset) -> TidSet {
        let mut sets = Vec::with_capacity(itemset.len());
        for item in itemset.items() {
            match self.index.get(item) {
                Some(s) => sets.push(s),
                None => return TidSet::empty(),
            }
        }
        crate::tidset::intersect_all(&mut sets, self.len())
    }

    /// Ascending tids of transactions containing every item of `itemset`.
    pub fn supporting_tids(&self, itemset: &Itemset) -> Vec<Tid> {
        self.supporting_positions(itemset)
            .iter()
            .map(|p| p + 1)
            .collect()
    }

    /// Number of duplicate item occurrences collapsed while building.
    pub fn collapsed_duplicates(&self) -> usize {
        self.collapsed_duplicates
    }

    pub fn total_items(&self) -> usize {
        self.transactions.iter().map(Vec::len).sum()
    }
}

impl PartialEq for TransactionDatabase {
    fn eq(&self, other: &Self) -> bool {
        self.transactions == other.transactions
    }
}

impl Eq for TransactionDatabase {}

impl fmt::Debug for TransactionDatabase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransactionDatabase")
            .field("transactions", &self.transactions.len())
            .field("items", &self.index.len())
            .finish()
    }
}

/// Size characteristics of a database.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DatasetStats {
    pub n_transactions: usize,
    pub n_items: usize,
    pub total_items: usize,
}

impl DatasetStats {
    pub fn avg_len(&self) -> f64 {
        if self.n_transactions == 0 {
            0.0
        } else {
            self.total_items as f64 / self.n_transactions as f64
        }
    }

    /// Average length truncated (not rounded) to two decimals, the way
    /// published FIMI dataset tables print it (retail: 10.3058 -> "10.30").
    pub fn avg_len_display(&self) -> String {
        if self.n_transactions == 0 {
            return "0.00".to_string();
        }
        let hundredths = (self.total_items as u128 * 100) / self.n_transactions as u128;
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }
}

impl fmt::Display for DatasetStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} transactions, {} items, avg. length {}",
            self.n_transactions,
            self.n_items,
            self.avg_len_display()
        )
    }
}

pub fn db_stats(db: &TransactionDatabase) -> DatasetStats {
    DatasetStats {
        n_transactions: db.len(),
        n_items: db.n_items(),
        total_items: db.total_items(),
    }
}

/// Splits file content into lines (LF or CRLF) and each line into item
/// tokens. Blank lines yield empty item lists.
fn parse_lines(path: &Path, content: &str) -> Result<Vec<Vec<Item>>> {
    let delimiter = Delimiter::for_path(path).as_char();
    let body = content.strip_suffix('\n').unwrap_or(content);
    if content.is_empty() {
        return Ok(Vec::new());
    }
    body.split('\n')
        .enumerate()
        .map(|(lineno, line)| {
            let line = line.strip_suffix('\r').unwrap_or(line);
            let mut items = Vec::new();
            let mut offset = 0;
            for raw in line.split(delimiter) {
                let column = offset + 1;
                offset += raw.len() + 1;
                let token = raw.trim_matches(|c: char| c.is_ascii_whitespace());
                if token.is_empty() {
                    continue;
                }
                let item = token
                    .bytes()
                    .all(|b| b.is_ascii_digit())
                    .then(|| token.parse::<Item>().ok())
                    .flatten()
                    .ok_or_else(|| Error::Parse {
                        path: path.to_path_buf(),
                        line: lineno + 1,
                        column,
                        token: token.to_string(),
                    })?;
                items.push(item);
            }
            Ok(items)
        })
        .collect()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Reads a transaction database. Transaction `k` is line `k`; blank lines
/// are empty transactions.
pub fn parse_database(path: impl AsRef<Path>) -> Result<TransactionDatabase> {
    let path = path.as_ref();
    let lines = parse_lines(path, &read(path)?)?;
    if lines.is_empty() {
        return Err(Error::EmptyDatabase {
            path: path.to_path_buf(),
        });
    }
    let db = TransactionDatabase::from_transactions(lines);
    if db.collapsed_duplicates() > 0 {
        log::warn!(
            "{}: collapsed {} duplicate item occurrences",
            path.display(),
            db.collapsed_duplicates()
        );
    }
    Ok(db)
}

/// Reads a sensitive-itemset file: one itemset per non-empty line,
/// canonicalized, duplicates dropped (first occurrence kept).
pub fn parse_itemset_file(path: impl AsRef<Path>) -> Result<Vec<Itemset>> {
    let path = path.as_ref();
    let lines = parse_lines(path, &read(path)?)?;
    let mut seen = std::collections::HashSet::new();
    Ok(lines
        .into_iter()
        .filter_map(Itemset::new)
        .filter(|s| seen.insert(s.clone()))
        .collect())
}

fn write_lines<'a>(
    path: &Path,
    lines: impl Iterator<Item = &'a [Item]>,
) -> Result<()> {
    let delimiter = Delimiter::for_path(path).as_char();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut buf = String::new();
    for items in lines {
        buf.clear();
        for (i, item) in items.iter().enumerate() {
            if i > 0 {
                buf.push(delimiter);
            }
            buf.push_str(&item.to_string());
        }
        buf.push('\n');
        out.write_all(buf.as_bytes())
            .map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Writes one line per transaction in tid order. Emptied transactions become
/// blank lines so tids survive a round trip.
pub fn write_database(db: &TransactionDatabase, path: impl AsRef<Path>) -> Result<()> {
    write_lines(path.as_ref(), db.transactions.iter().map(Vec::as_slice))
}

/// Writes itemsets in the sensitive-file format.
pub fn write_itemset_file(itemsets: &[Itemset], path: impl AsRef<Path>) -> Result<()> {
    write_lines(path.as_ref(), itemsets.iter().map(Itemset::items))
}
