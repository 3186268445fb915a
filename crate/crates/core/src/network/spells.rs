use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub const SPELL_CSV_HEADER: &str = "replicate,tail,head,onset,terminus,censored";

/// One contiguous interval during which a tie exists. `terminus` is the step
/// at which the tie was first absent; `None` while the tie is still open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spell {
    pub tail: u32,
    pub head: u32,
    pub onset: u64,
    pub terminus: Option<u64>,
    /// Open at the end of the run, or present in the seeded initial network.
    pub censored: bool,
}

impl Spell {
    pub fn duration(&self) -> Option<u64> {
        self.terminus.map(|end| end - self.onset)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpellLog {
    spells: Vec<Spell>,
}

impl SpellLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, spell: Spell) {
        self.spells.push(spell);
    }

    pub fn len(&self) -> usize {
        self.spells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spells.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Spell> {
        self.spells.iter()
    }

    pub fn as_slice(&self) -> &[Spell] {
        &self.spells
    }

    /// Writes rows (no header) with 1-based actor labels. Open spells are
    /// written with `terminus = final_time`.
    pub fn write_csv_rows<W: Write>(&self, w: &mut W, replicate: usize, final_time: u64) -> io::Result<()> {
        for s in &self.spells {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                replicate,
                s.tail + 1,
                s.head + 1,
                s.onset,
                s.terminus.unwrap_or(final_time),
                u8::from(s.censored)
            )?;
        }
        Ok(())
    }
}

impl Extend<Spell> for SpellLog {
    fn extend<T: IntoIterator<Item = Spell>>(&mut self, iter: T) {
        self.spells.extend(iter);
    }
}

impl FromIterator<Spell> for SpellLog {
    fn from_iter<T: IntoIterator<Item = Spell>>(iter: T) -> Self {
        SpellLog {
            spells: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a SpellLog {
    type Item = &'a Spell;
    type IntoIter = std::slice::Iter<'a, Spell>;

    fn into_iter(self) -> Self::IntoIter {
        self.spells.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rows_use_one_based_labels_and_close_open_spells() {
        let log: SpellLog = [
            Spell {
                tail: 0,
                head: 2,
                onset: 3,
                terminus: Some(5),
                censored: false,
            },
            Spell {
                tail: 1,
                head: 2,
                onset: 4,
                terminus: None,
                censored: true,
            },
        ]
        .into_iter()
        .collect();
        let mut buf = Vec::new();
        log.write_csv_rows(&mut buf, 2, 10).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2,1,3,3,5,0\n2,2,3,4,10,1\n");
    }
}
