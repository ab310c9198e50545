//! Reader and writer for the VTK XML PolyData exchange dialect.
//!
//! Geometry lives in the `Piece` (points plus two-node `Lines`), per-entity
//! attributes in `PointData`/`CellData`, and the catalogs in an
//! `AppendedData/Characteristics` block whose `<item>` entries are
//! whitespace-separated token streams:
//!
//! ```text
//! <id> Rectangle width <w> height <h> [refNode <y|z> <code>]
//! <id> Circle width <diameter>
//! <id> Generic A <a> Iy <iy> Iz <iz> J <j> Wy <wy> Wz <wz> Wt <wt>
//! <id> IsoLinEl E <e> nu <nu> [tAlpha <a>] [density <rho>] [Ry <ry>]
//! <id> NodalLoad components 6 <fx> <fy> <fz> <mx> <my> <mz>
//! ```
//!
//! Unrecognised `key value` pairs inside catalog items are preserved. Two
//! optional blocks extend the dialect: `RIGID_LINKS` (`<master> <slave>
//! [offset <x> <y> <z>]`) and `LOADING` (`selfWeight <0|1> gravity <gx> <gy>
//! <gz>`). Only ASCII payloads are supported.
//!
//! Analysis results go out separately as legacy ASCII VTK polydata, see
//! [`write_results_vtk`].

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use roxmltree::{Document, Node};
use thiserror::Error;

use crate::model::{
    BoundaryCondition, Cell, CellKind, Material, Point, PointId, RigidLink, StructuralModel, STANDARD_GRAVITY,
};
use crate::post::{deformed_geometry, ResultSet};
use crate::section::{CrossSection, LocalAxis, RefNode, SectionProperties, SectionShape};

#[derive(Debug, Error)]
pub enum ExchangeError {
    // Not a `source`: the message already carries the parser's text.
    #[error("malformed markup: {0}")]
    Xml(roxmltree::Error),
    #[error("unexpected document structure: {0}")]
    Structure(String),
    #[error("unsupported payload: {0}")]
    Unsupported(String),
    #[error("array `{array}` has {found} values, expected {expected}")]
    LengthMismatch {
        array: String,
        expected: usize,
        found: usize,
    },
    #[error("array `{array}`: cannot parse `{token}`")]
    BadValue { array: String, token: String },
    #[error("{section} item `{item}`: {reason}")]
    CatalogItem {
        section: &'static str,
        item: String,
        reason: String,
    },
    #[error("unknown cell kind: {0}")]
    UnknownCellKind(String),
}

impl From<roxmltree::Error> for ExchangeError {
    fn from(e: roxmltree::Error) -> Self {
        ExchangeError::Xml(e)
    }
}

type Result<T> = std::result::Result<T, ExchangeError>;

const CELL_KIND_ARRAY: &str = "CELL_KIND";

fn structure(msg: impl Into<String>) -> ExchangeError {
    ExchangeError::Structure(msg.into())
}

fn element_children<'a, 'i>(node: Node<'a, 'i>) -> impl Iterator<Item = Node<'a, 'i>> {
    node.children().filter(|n| n.is_element())
}

fn single_child<'a, 'i>(node: Node<'a, 'i>, name: &str) -> Result<Option<Node<'a, 'i>>> {
    let mut found = element_children(node).filter(|n| n.tag_name().name() == name);
    let first = found.next();
    if found.next().is_some() {
        return Err(structure(format!(
            "more than one <{name}> inside <{}>",
            node.tag_name().name()
        )));
    }
    Ok(first)
}

fn count_attr(node: Node, name: &str) -> Result<usize> {
    match node.attribute(name) {
        None => Ok(0),
        Some(v) => v
            .trim()
            .parse()
            .map_err(|_| structure(format!("attribute {name}=\"{v}\" is not a count"))),
    }
}

fn array_name(node: Node) -> String {
    node.attribute("Name").unwrap_or("<unnamed>").to_string()
}

fn parse_values<T: FromStr>(node: Node) -> Result<Vec<T>> {
    match node.attribute("format") {
        Some("ascii") => {}
        Some(other) => {
            return Err(ExchangeError::Unsupported(format!(
                "DataArray `{}` uses format=\"{other}\"; only ascii is supported",
                array_name(node)
            )))
        }
        None => {
            return Err(ExchangeError::Unsupported(format!(
                "DataArray `{}` has no format attribute; only ascii is supported",
                array_name(node)
            )))
        }
    }
    let text: String = node
        .children()
        .filter(|n| n.is_text())
        .filter_map(|n| n.text())
        .collect();
    text.split_whitespace()
        .map(|tok| {
            tok.parse().map_err(|_| ExchangeError::BadValue {
                array: array_name(node),
                token: tok.to_string(),
            })
        })
        .collect()
}

fn named_arrays<'a, 'i>(node: Option<Node<'a, 'i>>) -> Result<BTreeMap<String, Node<'a, 'i>>> {
    let mut out = BTreeMap::new();
    if let Some(node) = node {
        for array in element_children(node) {
            if array.tag_name().name() != "DataArray" {
                return Err(structure(format!(
                    "unexpected <{}> inside <{}>",
                    array.tag_name().name(),
                    node.tag_name().name()
                )));
            }
            let name = array_name(array);
            if out.insert(name.clone(), array).is_some() {
                return Err(structure(format!("duplicate DataArray `{name}`")));
            }
        }
    }
    Ok(out)
}

fn expect_len<T>(array: &str, values: &[T], expected: usize) -> Result<()> {
    if values.len() == expected {
        Ok(())
    } else {
        Err(ExchangeError::LengthMismatch {
            array: array.to_string(),
            expected,
            found: values.len(),
        })
    }
}

/// Parse an exchange document into a model with dense point and cell ids.
pub fn parse_model(text: &str) -> Result<StructuralModel> {
    let doc = Document::parse(text)?;
    let root = doc.root_element();
    if root.tag_name().name() != "VTKFile" {
        return Err(structure(format!(
            "root element is <{}>, expected <VTKFile>",
            root.tag_name().name()
        )));
    }
    match root.attribute("type") {
        Some("PolyData") => {}
        other => {
            return Err(structure(format!(
                "VTKFile type {:?} is not PolyData",
                other.unwrap_or("")
            )))
        }
    }
    if let Some(compressor) = root.attribute("compressor") {
        return Err(ExchangeError::Unsupported(format!(
            "compressed payloads ({compressor})"
        )));
    }

    let mut model = StructuralModel::new();
    let poly = single_child(root, "PolyData")?.ok_or_else(|| structure("missing <PolyData>"))?;
    let mut pieces = element_children(poly).filter(|n| n.tag_name().name() == "Piece");
    let piece = pieces.next();
    if pieces.next().is_some() {
        return Err(structure("more than one <Piece>"));
    }
    if let Some(piece) = piece {
        read_piece(piece, &mut model)?;
    }

    if let Some(appended) = single_child(root, "AppendedData")? {
        if let Some(enc) = appended.attribute("encoding") {
            return Err(ExchangeError::Unsupported(format!(
                "appended data with encoding=\"{enc}\""
            )));
        }
        for t in appended.children().filter(|n| n.is_text()) {
            let s = t.text().unwrap_or("").trim();
            if !(s.is_empty() || s == "_") {
                return Err(ExchangeError::Unsupported(
                    "raw appended payload after the `_` marker".to_string(),
                ));
            }
        }
        if let Some(ch) = single_child(appended, "Characteristics")? {
            read_characteristics(ch, &mut model)?;
        }
    }
    Ok(model)
}

fn read_piece(piece: Node, model: &mut StructuralModel) -> Result<()> {
    let n_points = count_attr(piece, "NumberOfPoints")?;
    let n_lines = count_attr(piece, "NumberOfLines")?;
    for other in ["NumberOfVerts", "NumberOfPolys", "NumberOfStrips"] {
        if count_attr(piece, other)? > 0 {
            return Err(ExchangeError::UnknownCellKind(format!(
                "{other} > 0; only two-node lines are supported"
            )));
        }
    }

    let coords: Vec<f64> = match single_child(piece, "Points")? {
        Some(points) => {
            let array = single_child(points, "DataArray")?.ok_or_else(|| structure("<Points> without <DataArray>"))?;
            if let Some(nc) = array.attribute("NumberOfComponents") {
                if nc.trim() != "3" {
                    return Err(structure("point coordinates must have 3 components"));
                }
            }
            parse_values(array)?
        }
        None => Vec::new(),
    };
    expect_len("Points", &coords, 3 * n_points)?;
    model.points = coords
        .chunks_exact(3)
        .enumerate()
        .map(|(i, c)| Point::new(i as u32, [c[0], c[1], c[2]]))
        .collect();

    let lines = named_arrays(single_child(piece, "Lines")?)?;
    let connectivity: Vec<u32> = match lines.get("connectivity") {
        Some(a) => parse_values(*a)?,
        None => Vec::new(),
    };
    let offsets: Vec<usize> = match lines.get("offsets") {
        Some(a) => parse_values(*a)?,
        None => Vec::new(),
    };
    expect_len("offsets", &offsets, n_lines)?;
    expect_len("connectivity", &connectivity, offsets.last().copied().unwrap_or(0))?;
    let mut start = 0;
    for (i, &end) in offsets.iter().enumerate() {
        if end <= start {
            return Err(structure("line offsets must be strictly increasing"));
        }
        if end - start != 2 {
            return Err(ExchangeError::UnknownCellKind(format!(
                "line {i} has {} points; only two-node lines are supported",
                end - start
            )));
        }
        model
            .cells
            .push(Cell::beam(i as u32, connectivity[start], connectivity[start + 1], 0, 0));
        start = end;
    }

    let point_data = named_arrays(single_child(piece, "PointData")?)?;
    if let Some(array) = point_data.get("Boundary_Conditions") {
        let comps = array
            .attribute("NumOfComp")
            .or_else(|| array.attribute("NumberOfComponents"))
            .unwrap_or("6");
        if comps.trim() != "6" {
            return Err(structure("Boundary_Conditions must have 6 components"));
        }
        let flags: Vec<u8> = parse_values(*array)?;
        expect_len("Boundary_Conditions", &flags, 6 * n_points)?;
        for (p, chunk) in model.points.iter_mut().zip(flags.chunks_exact(6)) {
            for (slot, &flag) in p.fixed.iter_mut().zip(chunk) {
                *slot = match flag {
                    0 => false,
                    1 => true,
                    other => {
                        return Err(ExchangeError::BadValue {
                            array: "Boundary_Conditions".to_string(),
                            token: other.to_string(),
                        })
                    }
                };
            }
        }
    }
    if let Some(array) = point_data.get("ID_BOUNDARY_CONDITION") {
        let ids: Vec<u32> = parse_values(*array)?;
        expect_len("ID_BOUNDARY_CONDITION", &ids, n_points)?;
        for (p, id) in model.points.iter_mut().zip(ids) {
            p.bc_id = id;
        }
    }

    let cell_data = named_arrays(single_child(piece, "CellData")?)?;
    if let Some(array) = cell_data.get("ID_CROSS-SECTION") {
        let ids: Vec<u32> = parse_values(*array)?;
        expect_len("ID_CROSS-SECTION", &ids, n_lines)?;
        for (c, id) in model.cells.iter_mut().zip(ids) {
            c.cs_id = id;
        }
    }
    if let Some(array) = cell_data.get("ID_MATERIAL") {
        let ids: Vec<u32> = parse_values(*array)?;
        expect_len("ID_MATERIAL", &ids, n_lines)?;
        for (c, id) in model.cells.iter_mut().zip(ids) {
            c.mat_id = id;
        }
    }
    if let Some(array) = cell_data.get(CELL_KIND_ARRAY) {
        let kinds: Vec<u32> = parse_values(*array)?;
        expect_len(CELL_KIND_ARRAY, &kinds, n_lines)?;
        for (c, k) in model.cells.iter_mut().zip(kinds) {
            c.kind = match k {
                0 => CellKind::Beam,
                1 => CellKind::Truss,
                other => {
                    return Err(ExchangeError::UnknownCellKind(format!(
                        "{CELL_KIND_ARRAY} value {other}"
                    )))
                }
            };
        }
    }
    Ok(())
}

fn items<'a, 'i>(section: Node<'a, 'i>) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for child in element_children(section) {
        if child.tag_name().name() != "item" {
            return Err(structure(format!(
                "unexpected <{}> inside <{}>",
                child.tag_name().name(),
                section.tag_name().name()
            )));
        }
        let text: String = child.children().filter_map(|n| n.text()).collect();
        out.push(text.trim().to_string());
    }
    if let Some(declared) = section.attribute("Number") {
        let declared: usize = declared
            .trim()
            .parse()
            .map_err(|_| structure(format!("Number=\"{declared}\" is not a count")))?;
        expect_len(section.tag_name().name(), &out, declared)?;
    }
    Ok(out)
}

/// Cursor over the whitespace tokens of one catalog item.
struct ItemTokens<'a> {
    section: &'static str,
    item: &'a str,
    tokens: Vec<&'a str>,
    pos: usize,
}

impl<'a> ItemTokens<'a> {
    fn new(section: &'static str, item: &'a str) -> Self {
        ItemTokens {
            section,
            item,
            tokens: item.split_whitespace().collect(),
            pos: 0,
        }
    }

    fn err(&self, reason: impl Into<String>) -> ExchangeError {
        ExchangeError::CatalogItem {
            section: self.section,
            item: self.item.to_string(),
            reason: reason.into(),
        }
    }

    fn next_token(&mut self, what: &str) -> Result<&'a str> {
        let tok = self
            .tokens
            .get(self.pos)
            .copied()
            .ok_or_else(|| self.err(format!("missing {what}")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn next_value<T: FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.next_token(what)?;
        tok.parse()
            .map_err(|_| self.err(format!("cannot parse {what} from `{tok}`")))
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }
}

/// Reads `key value` pairs until the end of the item, dispatching known keys
/// to `known` and collecting the rest.
fn key_values<'a>(
    t: &mut ItemTokens<'a>,
    mut known: impl FnMut(&str, &mut ItemTokens<'a>) -> Result<bool>,
) -> Result<Vec<(String, String)>> {
    let mut extra = Vec::new();
    while !t.done() {
        let key = t.next_token("key")?;
        if !known(key, t)? {
            let value = t.next_token(&format!("value for `{key}`"))?;
            extra.push((key.to_string(), value.to_string()));
        }
    }
    Ok(extra)
}

fn require(t: &ItemTokens, name: &str, value: Option<f64>) -> Result<f64> {
    value.ok_or_else(|| t.err(format!("missing `{name}`")))
}

fn parse_cross_section(item: &str) -> Result<(u32, CrossSection)> {
    let mut t = ItemTokens::new("CROSS-SECTIONS", item);
    let id: u32 = t.next_value("id")?;
    let kind = t.next_token("shape")?;
    let mut vals: BTreeMap<&'static str, f64> = BTreeMap::new();
    let mut ref_node = None;
    let keys: &[&'static str] = match kind {
        "Rectangle" => &["width", "height"],
        "Circle" => &["width"],
        "Generic" => &["A", "Iy", "Iz", "J", "Wy", "Wz", "Wt"],
        other => return Err(t.err(format!("unknown cross-section shape `{other}`"))),
    };
    let extra = key_values(&mut t, |key, t| {
        if let Some(&k) = keys.iter().find(|&&k| k == key) {
            let v = t.next_value(k)?;
            if vals.insert(k, v).is_some() {
                return Err(t.err(format!("duplicate `{k}`")));
            }
            Ok(true)
        } else if key == "refNode" && kind == "Rectangle" {
            let axis = match t.next_token("refNode axis")? {
                "y" => LocalAxis::Y,
                "z" => LocalAxis::Z,
                other => return Err(t.err(format!("refNode axis `{other}` is not y or z"))),
            };
            let code: i64 = t.next_value("refNode code")?;
            if (-3..0).contains(&code) || code >= 0 {
                ref_node = Some(RefNode { axis, code });
                Ok(true)
            } else {
                Err(t.err(format!("refNode code {code} is not an axis code or point id")))
            }
        } else {
            Ok(false)
        }
    })?;
    let shape = match kind {
        "Rectangle" => SectionShape::Rectangle {
            width: require(&t, "width", vals.get("width").copied())?,
            height: require(&t, "height", vals.get("height").copied())?,
            ref_node,
        },
        "Circle" => SectionShape::Circle {
            diameter: require(&t, "width", vals.get("width").copied())?,
        },
        _ => {
            let g = |k| require(&t, k, vals.get(k).copied());
            SectionShape::Generic(SectionProperties {
                area: g("A")?,
                iy: g("Iy")?,
                iz: g("Iz")?,
                torsion: g("J")?,
                wy: g("Wy")?,
                wz: g("Wz")?,
                wt: g("Wt")?,
            })
        }
    };
    Ok((id, CrossSection { shape, extra }))
}

fn parse_material(item: &str) -> Result<(u32, Material)> {
    let mut t = ItemTokens::new("MATERIALS", item);
    let id: u32 = t.next_value("id")?;
    let kind = t.next_token("material kind")?;
    if kind != "IsoLinEl" {
        return Err(t.err(format!("unknown material kind `{kind}`")));
    }
    let (mut e, mut nu, mut t_alpha, mut density, mut ry) = (None, None, None, None, None);
    let extra = key_values(&mut t, |key, t| {
        let slot = match key {
            "E" => &mut e,
            "nu" => &mut nu,
            "tAlpha" => &mut t_alpha,
            "density" => &mut density,
            "Ry" => &mut ry,
            _ => return Ok(false),
        };
        if slot.replace(t.next_value::<f64>(key)?).is_some() {
            return Err(t.err(format!("duplicate `{key}`")));
        }
        Ok(true)
    })?;
    Ok((
        id,
        Material {
            e: require(&t, "E", e)?,
            nu: require(&t, "nu", nu)?,
            t_alpha: t_alpha.unwrap_or(0.0),
            density: density.unwrap_or(0.0),
            yield_stress: ry.unwrap_or(Material::DEFAULT_YIELD_STRESS),
            extra,
        },
    ))
}

fn parse_boundary_condition(item: &str) -> Result<(u32, BoundaryCondition)> {
    let mut t = ItemTokens::new("BOUNDARY_CONDITIONS", item);
    let id: u32 = t.next_value("id")?;
    let kind = t.next_token("boundary condition kind")?;
    if kind != "NodalLoad" {
        return Err(t.err(format!("unknown boundary condition kind `{kind}`")));
    }
    let mut components = None;
    let extra = key_values(&mut t, |key, t| {
        if key != "components" {
            return Ok(false);
        }
        let n: usize = t.next_value("component count")?;
        if n != 6 {
            return Err(t.err(format!("expected 6 components, found count {n}")));
        }
        let mut c = [0.0; 6];
        for v in c.iter_mut() {
            *v = t.next_value("load component")?;
        }
        components = Some(c);
        Ok(true)
    })?;
    let components = components.ok_or_else(|| t.err("missing `components`"))?;
    Ok((id, BoundaryCondition { components, extra }))
}

fn parse_rigid_link(item: &str) -> Result<RigidLink> {
    let mut t = ItemTokens::new("RIGID_LINKS", item);
    let master = PointId(t.next_value("master")?);
    let slave = PointId(t.next_value("slave")?);
    let mut offset = None;
    if !t.done() {
        let key = t.next_token("offset")?;
        if key != "offset" {
            return Err(t.err(format!("unexpected `{key}`")));
        }
        offset = Some([
            t.next_value("offset x")?,
            t.next_value("offset y")?,
            t.next_value("offset z")?,
        ]);
    }
    if !t.done() {
        return Err(t.err("trailing tokens"));
    }
    Ok(RigidLink { master, slave, offset })
}

fn parse_loading(item: &str, model: &mut StructuralModel) -> Result<()> {
    let mut t = ItemTokens::new("LOADING", item);
    while !t.done() {
        match t.next_token("key")? {
            "selfWeight" => {
                model.self_weight = match t.next_value::<u8>("selfWeight")? {
                    0 => false,
                    1 => true,
                    other => return Err(t.err(format!("selfWeight {other} is not 0 or 1"))),
                }
            }
            "gravity" => {
                model.gravity = [
                    t.next_value("gravity x")?,
                    t.next_value("gravity y")?,
                    t.next_value("gravity z")?,
                ]
            }
            other => return Err(t.err(format!("unknown key `{other}`"))),
        }
    }
    Ok(())
}

fn insert_unique<T>(
    map: &mut BTreeMap<u32, T>,
    section: &'static str,
    item: &str,
    (id, value): (u32, T),
) -> Result<()> {
    if map.insert(id, value).is_some() {
        return Err(ExchangeError::CatalogItem {
            section,
            item: item.to_string(),
            reason: format!("duplicate id {id}"),
        });
    }
    Ok(())
}

fn read_characteristics(ch: Node, model: &mut StructuralModel) -> Result<()> {
    for section in element_children(ch) {
        let name = section.tag_name().name();
        let entries = items(section)?;
        match name {
            "COMMENT" => model.comment = entries.join("\n"),
            "CROSS-SECTIONS" => {
                for item in &entries {
                    let parsed = parse_cross_section(item)?;
                    insert_unique(&mut model.cross_sections, "CROSS-SECTIONS", item, parsed)?;
                }
            }
            "MATERIALS" => {
                for item in &entries {
                    let parsed = parse_material(item)?;
                    insert_unique(&mut model.materials, "MATERIALS", item, parsed)?;
                }
            }
            "BOUNDARY_CONDITIONS" => {
                for item in &entries {
                    let parsed = parse_boundary_condition(item)?;
                    insert_unique(&mut model.bcs, "BOUNDARY_CONDITIONS", item, parsed)?;
                }
            }
            "RIGID_LINKS" => {
                for item in &entries {
                    model.rigid_links.push(parse_rigid_link(item)?);
                }
            }
            "LOADING" => {
                for item in &entries {
                    parse_loading(item, model)?;
                }
            }
            other => return Err(structure(format!("unknown catalog section <{other}>"))),
        }
    }
    Ok(())
}

/// Shortest decimal representation that parses back to the same value.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn extra_tokens(out: &mut String, extra: &[(String, String)]) {
    for (k, v) in extra {
        let _ = write!(out, " {k} {v}");
    }
}

fn open_array(out: &mut String, ty: &str, name: &str, extra_attr: &str) {
    let _ = writeln!(
        out,
        "        <DataArray format=\"ascii\" type=\"{ty}\" Name=\"{name}\"{extra_attr}>"
    );
}

const CLOSE_ARRAY: &str = "        </DataArray>\n";

/// Serialise a model in the exchange dialect.
///
/// Points and cells are written in ascending id order and renumbered by
/// position, so `parse_model(&write_model(m)) == m.compacted()`.
pub fn write_model(model: &StructuralModel) -> String {
    let m = model.compacted();
    let mut out = String::new();
    out.push_str("<VTKFile type=\"PolyData\" version=\"0.1\" byte_order=\"LittleEndian\">\n");
    out.push_str("  <PolyData>\n");
    let _ = writeln!(
        out,
        "    <Piece NumberOfPoints=\"{}\" NumberOfLines=\"{}\">",
        m.points.len(),
        m.cells.len()
    );

    if !m.points.is_empty() {
        out.push_str("      <Points>\n");
        out.push_str("        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n");
        for p in &m.points {
            let [x, y, z] = p.coords;
            let _ = writeln!(out, "          {} {} {}", fmt_f64(x), fmt_f64(y), fmt_f64(z));
        }
        out.push_str(CLOSE_ARRAY);
        out.push_str("      </Points>\n");
    }

    if !m.cells.is_empty() {
        out.push_str("      <Lines>\n");
        open_array(&mut out, "Int32", "connectivity", "");
        for c in &m.cells {
            let _ = writeln!(out, "          {} {}", c.nodes[0], c.nodes[1]);
        }
        out.push_str(CLOSE_ARRAY);
        open_array(&mut out, "Int32", "offsets", "");
        for i in 0..m.cells.len() {
            let _ = writeln!(out, "          {}", 2 * (i + 1));
        }
        out.push_str(CLOSE_ARRAY);
        out.push_str("      </Lines>\n");
    }

    if !m.points.is_empty() {
        out.push_str("      <PointData>\n");
        open_array(&mut out, "Int32", "Boundary_Conditions", " NumOfComp=\"6\"");
        for p in &m.points {
            let flags: Vec<&str> = p.fixed.iter().map(|&f| if f { "1" } else { "0" }).collect();
            let _ = writeln!(out, "          {}", flags.join(" "));
        }
        out.push_str(CLOSE_ARRAY);
        open_array(&mut out, "Int32", "ID_BOUNDARY_CONDITION", "");
        for p in &m.points {
            let _ = writeln!(out, "          {}", p.bc_id);
        }
        out.push_str(CLOSE_ARRAY);
        out.push_str("      </PointData>\n");
    }

    if !m.cells.is_empty() {
        out.push_str("      <CellData>\n");
        open_array(&mut out, "Int32", "ID_CROSS-SECTION", "");
        for c in &m.cells {
            let _ = writeln!(out, "          {}", c.cs_id);
        }
        out.push_str(CLOSE_ARRAY);
        open_array(&mut out, "Int32", "ID_MATERIAL", "");
        for c in &m.cells {
            let _ = writeln!(out, "          {}", c.mat_id);
        }
        out.push_str(CLOSE_ARRAY);
        if m.cells.iter().any(|c| c.kind != CellKind::Beam) {
            open_array(&mut out, "Int32", CELL_KIND_ARRAY, "");
            for c in &m.cells {
                let k = match c.kind {
                    CellKind::Beam => 0,
                    CellKind::Truss => 1,
                };
                let _ = writeln!(out, "          {k}");
            }
            out.push_str(CLOSE_ARRAY);
        }
        out.push_str("      </CellData>\n");
    }

    out.push_str("    </Piece>\n");
    out.push_str("  </PolyData>\n");
    out.push_str("  <AppendedData>\n");
    out.push_str("    _\n");
    out.push_str("    <Characteristics>\n");

    out.push_str("      <COMMENT>");
    if !m.comment.is_empty() {
        for line in m.comment.split('\n') {
            let _ = write!(out, " <item> {} </item>", escape(line.trim()));
        }
    }
    out.push_str(" </COMMENT>\n");

    let _ = writeln!(out, "      <CROSS-SECTIONS Number=\"{}\">", m.cross_sections.len());
    for (id, cs) in &m.cross_sections {
        let mut item = format!("{id} ");
        match &cs.shape {
            SectionShape::Rectangle {
                width,
                height,
                ref_node,
            } => {
                let _ = write!(item, "Rectangle width {} height {}", fmt_f64(*width), fmt_f64(*height));
                if let Some(r) = ref_node {
                    let _ = write!(item, " refNode {} {}", r.axis.as_str(), r.code);
                }
            }
            SectionShape::Circle { diameter } => {
                let _ = write!(item, "Circle width {}", fmt_f64(*diameter));
            }
            SectionShape::Generic(p) => {
                let _ = write!(
                    item,
                    "Generic A {} Iy {} Iz {} J {} Wy {} Wz {} Wt {}",
                    fmt_f64(p.area),
                    fmt_f64(p.iy),
                    fmt_f64(p.iz),
                    fmt_f64(p.torsion),
                    fmt_f64(p.wy),
                    fmt_f64(p.wz),
                    fmt_f64(p.wt)
                );
            }
        }
        extra_tokens(&mut item, &cs.extra);
        let _ = writeln!(out, "        <item> {} </item>", escape(&item));
    }
    out.push_str("      </CROSS-SECTIONS>\n");

    let _ = writeln!(out, "      <MATERIALS Number=\"{}\">", m.materials.len());
    for (id, mat) in &m.materials {
        let mut item = format!(
            "{id} IsoLinEl E {} nu {} tAlpha {} density {} Ry {}",
            fmt_f64(mat.e),
            fmt_f64(mat.nu),
            fmt_f64(mat.t_alpha),
            fmt_f64(mat.density),
            fmt_f64(mat.yield_stress)
        );
        extra_tokens(&mut item, &mat.extra);
        let _ = writeln!(out, "        <item> {} </item>", escape(&item));
    }
    out.push_str("      </MATERIALS>\n");

    let _ = writeln!(out, "      <BOUNDARY_CONDITIONS Number=\"{}\">", m.bcs.len());
    for (id, bc) in &m.bcs {
        let comps: Vec<String> = bc.components.iter().map(|&v| fmt_f64(v)).collect();
        let mut item = format!("{id} NodalLoad components 6 {}", comps.join(" "));
        extra_tokens(&mut item, &bc.extra);
        let _ = writeln!(out, "        <item> {} </item>", escape(&item));
    }
    out.push_str("      </BOUNDARY_CONDITIONS>\n");

    if !m.rigid_links.is_empty() {
        let _ = writeln!(out, "      <RIGID_LINKS Number=\"{}\">", m.rigid_links.len());
        for link in &m.rigid_links {
            let mut item = format!("{} {}", link.master, link.slave);
            if let Some([x, y, z]) = link.offset {
                let _ = write!(item, " offset {} {} {}", fmt_f64(x), fmt_f64(y), fmt_f64(z));
            }
            let _ = writeln!(out, "        <item> {item} </item>");
        }
        out.push_str("      </RIGID_LINKS>\n");
    }

    let default_gravity = [0.0, 0.0, -STANDARD_GRAVITY];
    if !m.self_weight || m.gravity != default_gravity {
        let [gx, gy, gz] = m.gravity;
        let _ = writeln!(
            out,
            "      <LOADING> <item> selfWeight {} gravity {} {} {} </item> </LOADING>",
            u8::from(m.self_weight),
            fmt_f64(gx),
            fmt_f64(gy),
            fmt_f64(gz)
        );
    }

    out.push_str("    </Characteristics>\n");
    out.push_str("  </AppendedData>\n");
    out.push_str("</VTKFile>\n");
    out
}

/// Results as legacy ASCII VTK polydata for viewers: points moved by
/// `deform_scale` × displacement, the displacement vectors, and per line the
/// resistance ratio and a 0/1 `exceeded` flag.
pub fn write_results_vtk(model: &StructuralModel, results: &ResultSet, deform_scale: f64) -> Result<String> {
    let n = model.points.len();
    let m = model.cells.len();
    expect_len("displacement", &results.displacements, n)?;
    expect_len("resistance_ratio", &results.u_el, m)?;
    expect_len("exceeded", &results.exceeded, m)?;
    if !deform_scale.is_finite() {
        return Err(structure(format!(
            "deformation scale must be finite, got {deform_scale}"
        )));
    }
    let index = model.point_index();
    let mut lines = Vec::with_capacity(m);
    for c in &model.cells {
        let (Some(&a), Some(&b)) = (index.get(&c.nodes[0]), index.get(&c.nodes[1])) else {
            return Err(structure(format!("cell {} references a missing point", c.id)));
        };
        lines.push((a, b));
    }

    let mut out = String::new();
    out.push_str("# vtk DataFile Version 3.0\n");
    let title = model.comment.lines().next().unwrap_or("").trim();
    let _ = writeln!(out, "{}", if title.is_empty() { "formpipe results" } else { title });
    out.push_str("ASCII\nDATASET POLYDATA\n");
    let _ = writeln!(out, "POINTS {n} double");
    for p in deformed_geometry(model, &results.displacements, deform_scale) {
        let _ = writeln!(out, "{} {} {}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(p[2]));
    }
    let _ = writeln!(out, "LINES {m} {}", 3 * m);
    for (a, b) in lines {
        let _ = writeln!(out, "2 {a} {b}");
    }
    if n > 0 {
        let _ = writeln!(out, "POINT_DATA {n}");
        out.push_str("VECTORS displacement double\n");
        for d in &results.displacements {
            let _ = writeln!(out, "{} {} {}", fmt_f64(d[0]), fmt_f64(d[1]), fmt_f64(d[2]));
        }
    }
    if m > 0 {
        let _ = writeln!(out, "CELL_DATA {m}");
        out.push_str("SCALARS resistance_ratio double 1\nLOOKUP_TABLE default\n");
        for u in &results.u_el {
            let _ = writeln!(out, "{}", fmt_f64(*u));
        }
        out.push_str("SCALARS exceeded int 1\nLOOKUP_TABLE default\n");
        for &x in &results.exceeded {
            let _ = writeln!(out, "{}", u8::from(x));
        }
    }
    Ok(out)
}
