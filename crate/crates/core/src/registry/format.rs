//! Single-file index container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "SDIX" | version: u32 | body | sha256(magic..body): [u8; 32]
//! ```
//!
//! The body holds the lexicon fingerprint, the service table in canonical
//! order (records, vectors with raw f64 bits, provenance) and both posting
//! maps. Strings are u32 length-prefixed UTF-8.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use super::index::{AnnotatedService, ServiceId, ServiceIndex};
use super::ServiceRecord;
use crate::annotator::{Provenance, SemanticVector};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SDIX";
pub const FORMAT_VERSION: u32 = 1;
const CHECKSUM_LEN: usize = 32;

impl ServiceIndex {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer(Vec::new());
        w.0.extend_from_slice(MAGIC);
        w.u32(FORMAT_VERSION);
        w.str(&self.lexicon_fingerprint);

        w.len(self.services.len());
        for s in &self.services {
            let r = &s.record;
            w.str(&r.name);
            w.opt_str(r.description.as_deref());
            w.opt_str(r.documentation.as_deref());
            w.strs(&r.tags);
            w.strs(&r.categories);
            w.len(s.categories_normalized.len());
            for c in &s.categories_normalized {
                w.str(c);
            }
            w.len(s.vector.len());
            for (concept, weight) in s.vector.iter() {
                w.str(concept);
                w.0.extend_from_slice(&weight.to_bits().to_le_bytes());
                match s.vector.provenance(concept) {
                    Some(p) => {
                        w.0.push(1);
                        w.str(&p.lexical_form);
                        w.strs(&p.matched_words);
                    }
                    None => w.0.push(0),
                }
            }
        }
        w.postings(&self.concept_postings);
        w.postings(&self.category_postings);

        let digest = Sha256::digest(&w.0);
        w.0.extend_from_slice(&digest);
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < MAGIC.len() + 4 + CHECKSUM_LEN {
            if bytes.len() >= 4 && &bytes[..4] != MAGIC {
                return Err(Error::BadMagic);
            }
            return Err(Error::Integrity("file truncated".into()));
        }
        if &bytes[..4] != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::VersionMismatch { found: version, expected: FORMAT_VERSION });
        }
        let (content, checksum) = bytes.split_at(bytes.len() - CHECKSUM_LEN);
        if Sha256::digest(content).as_slice() != checksum {
            return Err(Error::Integrity("checksum mismatch".into()));
        }

        let mut r = Reader { buf: content, pos: 8 };
        let lexicon_fingerprint = r.str()?;
        let n = r.len()?;
        let mut services = Vec::with_capacity(n.min(1 << 16));
        for _ in 0..n {
            let record = ServiceRecord {
                name: r.str()?,
                description: r.opt_str()?,
                documentation: r.opt_str()?,
                tags: r.strs()?,
                categories: r.strs()?,
            };
            let mut categories_normalized = BTreeSet::new();
            for _ in 0..r.len()? {
                categories_normalized.insert(r.str()?);
            }
            let mut vector = SemanticVector::new();
            for _ in 0..r.len()? {
                let concept = r.str()?;
                let weight = f64::from_bits(u64::from_le_bytes(r.take(8)?.try_into().unwrap()));
                let provenance = match r.take(1)?[0] {
                    0 => None,
                    1 => Some(Provenance { lexical_form: r.str()?, matched_words: r.strs()? }),
                    t => return Err(Error::Integrity(format!("bad provenance tag {t}"))),
                };
                if !(weight > 0.0 && weight.is_finite()) {
                    return Err(Error::Integrity(format!("invalid weight for {concept}")));
                }
                vector.insert(concept, weight, provenance);
            }
            services.push(AnnotatedService { record, vector, categories_normalized });
        }
        let concept_postings = r.postings()?;
        let category_postings = r.postings()?;
        if r.pos != content.len() {
            return Err(Error::Integrity("trailing bytes after postings".into()));
        }
        let index = ServiceIndex { services, concept_postings, category_postings, lexicon_fingerprint };
        index.verify()?;
        Ok(index)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }
}

struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn len(&mut self, n: usize) {
        self.u32(u32::try_from(n).expect("index section exceeds u32::MAX entries"));
    }

    fn str(&mut self, s: &str) {
        self.len(s.len());
        self.0.extend_from_slice(s.as_bytes());
    }

    fn opt_str(&mut self, s: Option<&str>) {
        match s {
            Some(s) => {
                self.0.push(1);
                self.str(s);
            }
            None => self.0.push(0),
        }
    }

    fn strs(&mut self, v: &[String]) {
        self.len(v.len());
        for s in v {
            self.str(s);
        }
    }

    fn postings(&mut self, p: &BTreeMap<String, BTreeSet<ServiceId>>) {
        self.len(p.len());
        for (key, ids) in p {
            self.str(key);
            self.len(ids.len());
            for id in ids {
                self.u32(*id);
            }
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        match end {
            Some(end) => {
                let s = &self.buf[self.pos..end];
                self.pos = end;
                Ok(s)
            }
            None => Err(Error::Integrity("unexpected end of data".into())),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn len(&mut self) -> Result<usize> {
        self.u32().map(|n| n as usize)
    }

    fn str(&mut self) -> Result<String> {
        let n = self.len()?;
        String::from_utf8(self.take(n)?.to_vec()).map_err(|_| Error::Integrity("invalid UTF-8".into()))
    }

    fn opt_str(&mut self) -> Result<Option<String>> {
        match self.take(1)?[0] {
            0 => Ok(None),
            1 => self.str().map(Some),
            t => Err(Error::Integrity(format!("bad option tag {t}"))),
        }
    }

    fn strs(&mut self) -> Result<Vec<String>> {
        (0..self.len()?).map(|_| self.str()).collect()
    }

    fn postings(&mut self) -> Result<BTreeMap<String, BTreeSet<ServiceId>>> {
        let mut out = BTreeMap::new();
        for _ in 0..self.len()? {
            let key = self.str()?;
            let ids = (0..self.len()?).map(|_| self.u32()).collect::<Result<BTreeSet<_>>>()?;
            out.insert(key, ids);
        }
        Ok(out)
    }
}
