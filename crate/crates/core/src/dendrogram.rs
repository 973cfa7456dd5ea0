//! Binary merge trees and their Newick / JSON serializations.
//!
//! Newick encodes branch lengths as height differences between a merge and
//! its children (leaves sit at height 0); JSON nests
//! `{label}` / `{children, height, size}` objects. Both formats carry
//! heights rounded to six decimals and round-trip topology and heights at
//! that precision. Height inversions (possible under Ward linkage) would
//! produce negative Newick branch lengths; those are clamped to zero with a
//! warning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A merge tree: leaves carry labels, merges carry the height at which two
/// clusters were joined and the number of leaves below.
#[derive(Debug, Clone, PartialEq)]
pub enum Dendrogram {
    Leaf {
        label: String,
    },
    Merge {
        left: Box<Dendrogram>,
        right: Box<Dendrogram>,
        height: f64,
        size: usize,
    },
}

impl Dendrogram {
    pub fn leaf(label: impl Into<String>) -> Dendrogram {
        Dendrogram::Leaf {
            label: label.into(),
        }
    }

    pub fn merge(left: Dendrogram, right: Dendrogram, height: f64) -> Dendrogram {
        let size = left.size() + right.size();
        Dendrogram::Merge {
            left: Box::new(left),
            right: Box::new(right),
            height,
            size,
        }
    }

    /// Number of leaves below this node.
    pub fn size(&self) -> usize {
        match self {
            Dendrogram::Leaf { .. } => 1,
            Dendrogram::Merge { size, .. } => *size,
        }
    }

    /// Merge height; leaves sit at height 0.
    pub fn height(&self) -> f64 {
        match self {
            Dendrogram::Leaf { .. } => 0.0,
            Dendrogram::Merge { height, .. } => *height,
        }
    }

    /// Labels in left-to-right traversal order.
    pub fn leaf_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.size());
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<String>) {
        match self {
            Dendrogram::Leaf { label } => out.push(label.clone()),
            Dendrogram::Merge { left, right, .. } => {
                left.collect_labels(out);
                right.collect_labels(out);
            }
        }
    }
}

/// Output formats for [`serialize_dendrogram`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeFormat {
    Newick,
    Json,
}

/// Serializes the tree in the chosen format.
pub fn serialize_dendrogram(tree: &Dendrogram, format: TreeFormat) -> String {
    match format {
        TreeFormat::Newick => to_newick(tree),
        TreeFormat::Json => to_json(tree),
    }
}

fn round6(h: f64) -> f64 {
    (h * 1e6).round() / 1e6
}

/// Minimal decimal rendering of a six-decimal height: `0.500000` prints as
/// `0.5`, `0.746667` stays as is.
fn format_height(h: f64) -> String {
    let mut s = format!("{:.6}", h);
    while s.ends_with('0') {
        s.pop();
    }
    if s.ends_with('.') {
        s.pop();
    }
    s
}

const NEWICK_SPECIAL: &[char] = &['(', ')', ',', ':', ';', '\'', '[', ']'];

fn escape_label(label: &str) -> String {
    if !label.is_empty()
        && !label.contains(NEWICK_SPECIAL)
        && !label.chars().any(char::is_whitespace)
    {
        label.to_owned()
    } else {
        format!("'{}'", label.replace('\'', "''"))
    }
}

/// Newick form, `(left:dh,right:dh)...;` with branch lengths as height
/// differences.
pub fn to_newick(tree: &Dendrogram) -> String {
    let mut out = String::new();
    newick_node(tree, &mut out);
    out.push(';');
    out
}

fn newick_node(node: &Dendrogram, out: &mut String) {
    match node {
        Dendrogram::Leaf { label } => out.push_str(&escape_label(label)),
        Dendrogram::Merge {
            left,
            right,
            height,
            ..
        } => {
            out.push('(');
            for (idx, child) in [left, right].into_iter().enumerate() {
                if idx > 0 {
                    out.push(',');
                }
                newick_node(child, out);
                let mut branch = round6(height - child.height());
                if branch < 0.0 {
                    log::warn!("clamping negative branch length {branch} to 0 (height inversion)");
                    branch = 0.0;
                }
                out.push(':');
                out.push_str(&format_height(branch));
            }
            out.push(')');
        }
    }
}

/// Parses the Newick form produced by [`to_newick`]. Heights are rebuilt
/// from branch lengths with leaves at height 0.
pub fn parse_newick(input: &str) -> Result<Dendrogram> {
    let mut parser = NewickParser {
        chars: input.trim().chars().collect(),
        pos: 0,
    };
    let tree = parser.node()?;
    parser.expect(';')?;
    parser.skip_ws();
    if parser.pos != parser.chars.len() {
        return Err(Error::DendrogramFormat(format!(
            "trailing input at offset {}",
            parser.pos
        )));
    }
    Ok(tree)
}

struct NewickParser {
    chars: Vec<char>,
    pos: usize,
}

impl NewickParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::DendrogramFormat(format!(
                "expected '{c}' at offset {}",
                self.pos
            )))
        }
    }

    fn node(&mut self) -> Result<Dendrogram> {
        self.skip_ws();
        if self.peek() == Some('(') {
            self.pos += 1;
            let (left, left_branch) = self.child()?;
            self.expect(',')?;
            let (right, right_branch) = self.child()?;
            self.expect(')')?;
            // Heights reconstruct bottom-up; both children must agree, but
            // clamped branches may flatten inversions, so take the max.
            let height = (left.height() + left_branch).max(right.height() + right_branch);
            Ok(Dendrogram::merge(left, right, height))
        } else {
            Ok(Dendrogram::leaf(self.label()?))
        }
    }

    fn child(&mut self) -> Result<(Dendrogram, f64)> {
        let node = self.node()?;
        self.expect(':')?;
        let branch = self.number()?;
        Ok((node, branch))
    }

    fn label(&mut self) -> Result<String> {
        self.skip_ws();
        if self.peek() == Some('\'') {
            self.pos += 1;
            let mut label = String::new();
            loop {
                match self.peek() {
                    Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                        label.push('\'');
                        self.pos += 2;
                    }
                    Some('\'') => {
                        self.pos += 1;
                        return Ok(label);
                    }
                    Some(c) => {
                        label.push(c);
                        self.pos += 1;
                    }
                    None => {
                        return Err(Error::DendrogramFormat(
                            "unterminated quoted label".to_owned(),
                        ))
                    }
                }
            }
        }
        let start = self.pos;
        while let Some(c) = self.peek() {
            if NEWICK_SPECIAL.contains(&c) || c.is_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::DendrogramFormat(format!(
                "expected a label at offset {start}"
            )));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self
            .peek()
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'))
        {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse()
            .map_err(|_| Error::DendrogramFormat(format!("bad branch length '{s}'")))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDto {
    Merge {
        children: Vec<NodeDto>,
        height: f64,
        size: usize,
    },
    Leaf {
        label: String,
    },
}

fn to_dto(node: &Dendrogram) -> NodeDto {
    match node {
        Dendrogram::Leaf { label } => NodeDto::Leaf {
            label: label.clone(),
        },
        Dendrogram::Merge {
            left,
            right,
            height,
            size,
        } => NodeDto::Merge {
            children: vec![to_dto(left), to_dto(right)],
            height: round6(*height),
            size: *size,
        },
    }
}

fn from_dto(dto: &NodeDto) -> Result<Dendrogram> {
    match dto {
        NodeDto::Leaf { label } => Ok(Dendrogram::leaf(label.clone())),
        NodeDto::Merge {
            children,
            height,
            size,
        } => {
            if children.len() != 2 {
                return Err(Error::DendrogramFormat(format!(
                    "merge nodes have exactly 2 children, got {}",
                    children.len()
                )));
            }
            let tree = Dendrogram::merge(from_dto(&children[0])?, from_dto(&children[1])?, *height);
            if tree.size() != *size {
                return Err(Error::DendrogramFormat(format!(
                    "stored size {size} does not match {} leaves",
                    tree.size()
                )));
            }
            Ok(tree)
        }
    }
}

/// JSON form with nested `{label}` / `{children, height, size}` objects.
pub fn to_json(tree: &Dendrogram) -> String {
    serde_json::to_string_pretty(&to_dto(tree)).expect("tree serialization cannot fail")
}

/// Parses the JSON form.
pub fn parse_json(input: &str) -> Result<Dendrogram> {
    let dto: NodeDto =
        serde_json::from_str(input).map_err(|e| Error::DendrogramFormat(e.to_string()))?;
    from_dto(&dto)
}
