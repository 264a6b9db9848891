//! JSON documents for algebras, orders and representations.
//!
//! Tables are flat and row-major (the index of `(a_0, .., a_{k-1})` over a set
//! of size `m` is `sum a_j m^(k-1-j)`); `null` marks an undefined entry.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::algebra::{algebra_from_functions, AlgebraTable, SelectorSet};
use crate::error::{Error, Result};
use crate::nfun::{FunctionSet, PartialFn, UNDEF};
use crate::relations::BinaryRelation;
use crate::represent::{RepKind, Representation};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub version: u32,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Body {
    Abstract(AbstractDoc),
    Functions(FunctionsDoc),
    Ordered(OrderedDoc),
    Representation(RepresentationDoc),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractDoc {
    pub n: usize,
    pub g_size: usize,
    pub sup: Vec<u32>,
    pub binops: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selectors: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionsDoc {
    pub n: usize,
    pub carrier_size: usize,
    pub functions: Vec<Vec<Option<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<Vec<[usize; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderedDoc {
    pub n: usize,
    pub g_size: usize,
    pub sup: Vec<u32>,
    pub binops: Vec<Vec<u32>>,
    pub order: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selectors: Option<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepresentationDoc {
    pub n: usize,
    pub g_size: usize,
    pub carrier_size: usize,
    pub method: RepKind,
    pub images: Vec<Vec<Option<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub block_offsets: Option<Vec<usize>>,
}

/// What an algebra-like document resolves to.
#[derive(Debug, Clone)]
pub struct LoadedAlgebra {
    pub algebra: AlgebraTable,
    /// Element `k` is function `k`, for function documents.
    pub functions: Option<Vec<PartialFn>>,
    pub order: Option<BinaryRelation>,
    pub selectors: Option<Vec<usize>>,
}

fn entries(f: &PartialFn) -> Vec<Option<u32>> {
    f.table()
        .iter()
        .map(|&v| (v != UNDEF).then_some(v))
        .collect()
}

fn function(n: usize, m: usize, e: &[Option<u32>]) -> Result<PartialFn> {
    PartialFn::new(n, m, e.iter().map(|v| v.unwrap_or(UNDEF)).collect())
}

fn order_pairs(r: &BinaryRelation) -> Vec<[usize; 2]> {
    r.pairs().into_iter().map(|(a, b)| [a, b]).collect()
}

impl Document {
    pub fn new(body: Body) -> Self {
        Document {
            version: FORMAT_VERSION,
            body,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Document =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        if doc.version != FORMAT_VERSION {
            return Err(Error::Malformed(format!(
                "unsupported version {} (expected {FORMAT_VERSION})",
                doc.version
            )));
        }
        Ok(doc)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Malformed(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("documents serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    pub fn from_algebra(alg: &AlgebraTable, selectors: Option<&SelectorSet>) -> Self {
        Self::new(Body::Abstract(AbstractDoc {
            n: alg.n(),
            g_size: alg.size(),
            sup: alg.sup_table().to_vec(),
            binops: alg.binop_tables().to_vec(),
            selectors: selectors.map(|s| s.elements().to_vec()),
        }))
    }

    pub fn from_ordered(alg: &AlgebraTable, order: &BinaryRelation) -> Self {
        Self::new(Body::Ordered(OrderedDoc {
            n: alg.n(),
            g_size: alg.size(),
            sup: alg.sup_table().to_vec(),
            binops: alg.binop_tables().to_vec(),
            order: order_pairs(order),
            selectors: None,
        }))
    }

    pub fn from_functions(fs: &FunctionSet) -> Self {
        Self::new(Body::Functions(FunctionsDoc {
            n: fs.arity(),
            carrier_size: fs.carrier(),
            functions: fs.functions().iter().map(entries).collect(),
            order: None,
        }))
    }

    pub fn from_representation(rep: &Representation) -> Self {
        Self::new(Body::Representation(RepresentationDoc {
            n: rep.n(),
            g_size: rep.source_size(),
            carrier_size: rep.carrier(),
            method: rep.kind(),
            images: rep.images().iter().map(entries).collect(),
            block_offsets: (!rep.block_offsets().is_empty()).then(|| rep.block_offsets().to_vec()),
        }))
    }

    /// Resolves an algebra-like document. Function documents are closed first
    /// (with `cap`); their listed functions keep their positions.
    pub fn algebra(&self, cap: usize) -> Result<LoadedAlgebra> {
        match &self.body {
            Body::Abstract(d) => Ok(LoadedAlgebra {
                algebra: AlgebraTable::new(d.n, d.g_size, d.sup.clone(), d.binops.clone())?,
                functions: None,
                order: None,
                selectors: d.selectors.clone(),
            }),
            Body::Ordered(d) => {
                let algebra = AlgebraTable::new(d.n, d.g_size, d.sup.clone(), d.binops.clone())?;
                let order = relation(d.g_size, &d.order)?;
                Ok(LoadedAlgebra {
                    algebra,
                    functions: None,
                    order: Some(order),
                    selectors: d.selectors.clone(),
                })
            }
            Body::Functions(d) => {
                let fns = d
                    .functions
                    .iter()
                    .map(|e| function(d.n, d.carrier_size, e))
                    .collect::<Result<Vec<_>>>()?;
                let fs = FunctionSet::new(d.n, d.carrier_size, fns)?;
                let (algebra, closure) = algebra_from_functions(&fs, cap)?;
                let order = d
                    .order
                    .as_ref()
                    .map(|o| relation(closure.len(), o))
                    .transpose()?;
                Ok(LoadedAlgebra {
                    algebra,
                    functions: Some(closure),
                    order,
                    selectors: None,
                })
            }
            Body::Representation(_) => Err(Error::Malformed(
                "expected an algebra document, found a representation".into(),
            )),
        }
    }

    pub fn representation(&self) -> Result<Representation> {
        let Body::Representation(d) = &self.body else {
            return Err(Error::Malformed("expected a representation document".into()));
        };
        if d.images.len() != d.g_size {
            return Err(Error::Malformed(format!(
                "{} images for {} elements",
                d.images.len(),
                d.g_size
            )));
        }
        let images = d
            .images
            .iter()
            .map(|e| function(d.n, d.carrier_size, e))
            .collect::<Result<Vec<_>>>()?;
        Representation::new(d.n, d.carrier_size, images, d.method)
    }
}

fn relation(size: usize, pairs: &[[usize; 2]]) -> Result<BinaryRelation> {
    let pairs: Vec<(usize, usize)> = pairs.iter().map(|p| (p[0], p[1])).collect();
    BinaryRelation::from_pairs(size, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_CAP;
    use crate::nfun::projectors;

    #[test]
    fn round_trips() {
        let fs = FunctionSet::new(2, 2, projectors(2, 2).unwrap()).unwrap();
        let doc = Document::from_functions(&fs);
        assert_eq!(Document::parse(&doc.to_json()).unwrap(), doc);
        let loaded = doc.algebra(DEFAULT_CAP).unwrap();
        let a = Document::from_algebra(&loaded.algebra, None);
        assert_eq!(Document::parse(&a.to_json_pretty()).unwrap(), a);
        let o = Document::from_ordered(&loaded.algebra, &BinaryRelation::identity(2));
        assert_eq!(Document::parse(&o.to_json()).unwrap(), o);
        assert_eq!(
            o.algebra(DEFAULT_CAP).unwrap().order,
            Some(BinaryRelation::identity(2))
        );

        let partial = FunctionSet::new(2, 2, vec![PartialFn::parse(2, 2, "1---").unwrap()]).unwrap();
        let p = Document::from_functions(&partial);
        assert!(p.to_json().contains("[1,null,null,null]"));
        let loaded = p.algebra(DEFAULT_CAP).unwrap();
        assert_eq!(loaded.functions.unwrap()[0], partial.functions()[0]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Document::parse("{\"kind\":\"abstract\"}").is_err());
        let bad_version = r#"{"version":2,"kind":"abstract","n":1,"g_size":1,"sup":[0],"binops":[[0]]}"#;
        assert!(matches!(Document::parse(bad_version), Err(Error::Malformed(_))));
        let null_in_abstract = r#"{"version":1,"kind":"abstract","n":1,"g_size":1,"sup":[null],"binops":[[0]]}"#;
        assert!(Document::parse(null_in_abstract).is_err());
        let short = r#"{"version":1,"kind":"abstract","n":1,"g_size":2,"sup":[0],"binops":[[0]]}"#;
        let doc = Document::parse(short).unwrap();
        assert!(matches!(doc.algebra(DEFAULT_CAP), Err(Error::Malformed(_))));
    }
}
