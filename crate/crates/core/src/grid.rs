//! Grid geometry, cell populations and per-cell state.
//!
//! Coordinates use `x` growing rightward and `y` growing downward, so "up"
//! is `-y`. Directional quantities are always ordered `[up, right, down, left]`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, AddAssign, Index, IndexMut, Mul};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::rng::RngStream;

pub type CellId = u32;

/// Fixed sending strengths of input and output cells.
pub const UNIFORM_STRENGTHS: DirVec = DirVec([0.25; 4]);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coord {
    pub x: i32,
    pub y: i32,
}

impl Coord {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn manhattan(self, other: Coord) -> u32 {
        self.x.abs_diff(other.x) + self.y.abs_diff(other.y)
    }

    pub fn step(self, dx: i32, dy: i32) -> Coord {
        Coord::new(self.x + dx, self.y + dy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Direction {
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Right,
        Direction::Down,
        Direction::Left,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Unit grid displacement `(dx, dy)`.
    pub fn offset(self) -> (i32, i32) {
        match self {
            Direction::Up => (0, -1),
            Direction::Right => (1, 0),
            Direction::Down => (0, 1),
            Direction::Left => (-1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Right => "right",
            Direction::Down => "down",
            Direction::Left => "left",
        }
    }
}

/// Four-component directional quantity, ordered `[up, right, down, left]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct DirVec(pub [f64; 4]);

impl DirVec {
    pub const ZERO: DirVec = DirVec([0.0; 4]);

    pub const fn new(up: f64, right: f64, down: f64, left: f64) -> Self {
        Self([up, right, down, left])
    }

    pub fn dot(&self, other: &DirVec) -> f64 {
        self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum()
    }

    pub fn abs_sum(&self) -> f64 {
        self.0.iter().map(|c| c.abs()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn map(self, f: impl Fn(f64) -> f64) -> DirVec {
        DirVec(self.0.map(f))
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == 0.0)
    }
}

impl Index<Direction> for DirVec {
    type Output = f64;
    fn index(&self, d: Direction) -> &f64 {
        &self.0[d.index()]
    }
}

impl IndexMut<Direction> for DirVec {
    fn index_mut(&mut self, d: Direction) -> &mut f64 {
        &mut self.0[d.index()]
    }
}

impl Add for DirVec {
    type Output = DirVec;
    fn add(mut self, rhs: DirVec) -> DirVec {
        self += rhs;
        self
    }
}

impl AddAssign for DirVec {
    fn add_assign(&mut self, rhs: DirVec) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
    }
}

impl Mul<f64> for DirVec {
    type Output = DirVec;
    fn mul(self, k: f64) -> DirVec {
        self.map(|c| c * k)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum CellKind {
    Input,
    Processing,
    Output,
}

/// Learned parameters. Only processing cells ever change them.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LtmState {
    pub strengths: DirVec,
    pub expectation: f64,
}

/// Influx accumulated over a macro-episode; drives movement.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StmState {
    pub influx: DirVec,
    pub total: f64,
}

/// Activation within the current wave.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Activation {
    pub influx: DirVec,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Cell {
    pub id: CellId,
    pub kind: CellKind,
    pub pos: Coord,
    pub ltm: LtmState,
    pub stm: StmState,
    pub imm: Activation,
}

impl Cell {
    /// A non-plastic input or output cell with the uniform sending strengths.
    pub fn fixed(id: CellId, kind: CellKind, pos: Coord) -> Self {
        Self {
            id,
            kind,
            pos,
            ltm: LtmState {
                strengths: UNIFORM_STRENGTHS,
                expectation: 0.0,
            },
            stm: StmState::default(),
            imm: Activation::default(),
        }
    }

    pub fn processing(id: CellId, pos: Coord, strengths: DirVec, expectation: f64) -> Self {
        Self {
            id,
            kind: CellKind::Processing,
            pos,
            ltm: LtmState {
                strengths,
                expectation,
            },
            stm: StmState::default(),
            imm: Activation::default(),
        }
    }

    pub fn is_processing(&self) -> bool {
        self.kind == CellKind::Processing
    }

    /// Processing and output cells take part in a wave as receivers.
    pub fn receives(&self) -> bool {
        self.kind != CellKind::Input
    }
}

/// The grid, its cells, and the global plasticity lock.
///
/// Cells may be stored in any order; ids, not storage positions, decide
/// every tie-break.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    width: i32,
    height: i32,
    cells: Vec<Cell>,
    occupancy: Vec<Option<CellId>>,
    locked: bool,
}

impl Network {
    /// Builds the standard network: inputs, then processing cells at random
    /// free coordinates with LTM drawn from `[-1, 1]`, then outputs.
    ///
    /// Ids are assigned inputs first, then processing, then outputs. The
    /// stream is consumed as: position sample, then per processing cell (in
    /// id order) four strengths followed by the expectation.
    pub fn init(config: &SimConfig, rng: &mut RngStream) -> Result<Self> {
        let mut fixed: Vec<Coord> = config.input_coords.clone();
        fixed.extend(config.output_coords.iter().copied());
        let mut free: Vec<Coord> = (0..config.height)
            .flat_map(|y| (0..config.width).map(move |x| Coord::new(x, y)))
            .filter(|c| !fixed.contains(c))
            .collect();
        if config.processing_cells > free.len() {
            return Err(Error::NotEnoughSpace {
                requested: config.processing_cells,
                free: free.len(),
            });
        }
        let positions: Vec<Coord> = rng
            .choose_prefix(&mut free, config.processing_cells)
            .to_vec();

        let mut cells = Vec::with_capacity(fixed.len() + positions.len());
        let mut next_id: CellId = 0;
        for &pos in &config.input_coords {
            cells.push(Cell::fixed(next_id, CellKind::Input, pos));
            next_id += 1;
        }
        for pos in positions {
            let mut s = [0.0; 4];
            for c in s.iter_mut() {
                *c = rng.uniform(-1.0, 1.0);
            }
            let e = rng.uniform(-1.0, 1.0);
            cells.push(Cell::processing(next_id, pos, DirVec(s), e));
            next_id += 1;
        }
        for &pos in &config.output_coords {
            cells.push(Cell::fixed(next_id, CellKind::Output, pos));
            next_id += 1;
        }
        Self::from_cells(config.width, config.height, cells)
    }

    /// Assembles a network from explicit cells, checking bounds, id
    /// uniqueness and that no coordinate holds two cells.
    pub fn from_cells(width: i32, height: i32, cells: Vec<Cell>) -> Result<Self> {
        if width <= 0 || height <= 0 {
            return Err(Error::InvalidConfig("grid dimensions must be positive"));
        }
        let mut occupancy = vec![None; (width * height) as usize];
        for (i, cell) in cells.iter().enumerate() {
            let Coord { x, y } = cell.pos;
            if x < 0 || y < 0 || x >= width || y >= height {
                return Err(Error::OutOfBounds {
                    x,
                    y,
                    width,
                    height,
                });
            }
            if cells[..i].iter().any(|c| c.id == cell.id) {
                return Err(Error::DuplicateId(cell.id));
            }
            let slot = &mut occupancy[(y * width + x) as usize];
            if slot.is_some() {
                return Err(Error::Collision { x, y });
            }
            *slot = Some(cell.id);
        }
        Ok(Self {
            width,
            height,
            cells,
            occupancy,
            locked: false,
        })
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn height(&self) -> i32 {
        self.height
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Mutable access to cell state. Positions must be changed through
    /// [`Network::move_cell`] so that occupancy stays consistent.
    pub(crate) fn cells_mut(&mut self) -> &mut [Cell] {
        &mut self.cells
    }

    pub fn cell(&self, id: CellId) -> Option<&Cell> {
        self.cells.iter().find(|c| c.id == id)
    }

    pub fn cell_mut(&mut self, id: CellId) -> Option<&mut Cell> {
        self.cells.iter_mut().find(|c| c.id == id)
    }

    pub fn in_bounds(&self, c: Coord) -> bool {
        c.x >= 0 && c.y >= 0 && c.x < self.width && c.y < self.height
    }

    pub fn occupant(&self, c: Coord) -> Option<CellId> {
        if self.in_bounds(c) {
            self.occupancy[(c.y * self.width + c.x) as usize]
        } else {
            None
        }
    }

    /// Moves the cell stored at `index` to `to` if `to` is in bounds and
    /// free. Returns whether the move happened.
    pub(crate) fn move_cell(&mut self, index: usize, to: Coord) -> bool {
        if !self.in_bounds(to) || self.occupant(to).is_some() {
            return false;
        }
        let from = self.cells[index].pos;
        let w = self.width;
        self.occupancy[(from.y * w + from.x) as usize] = None;
        self.occupancy[(to.y * w + to.x) as usize] = Some(self.cells[index].id);
        self.cells[index].pos = to;
        true
    }

    pub fn is_locked(&self) -> bool {
        self.locked
    }

    /// Engages the global lock. There is no way to release it.
    pub fn lock(&mut self) {
        self.locked = true;
    }

    /// Output cell ids in ascending order; the first votes for action 0.
    pub fn output_ids(&self) -> Vec<CellId> {
        let mut ids: Vec<CellId> = self
            .cells
            .iter()
            .filter(|c| c.kind == CellKind::Output)
            .map(|c| c.id)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Input cell ids in ascending order, matching the normalized-state order.
    pub fn input_ids(&self) -> Vec<CellId> {
        let mut ids: Vec<CellId> = self
            .cells
            .iter()
            .filter(|c| c.kind == CellKind::Input)
            .map(|c| c.id)
            .collect();
        ids.sort_unstable();
        ids
    }

    /// Zeroes `v` and `V` on every processing and output cell.
    pub fn reset_immediate_state(&mut self) {
        for cell in self.cells.iter_mut().filter(|c| c.receives()) {
            cell.imm = Activation::default();
        }
    }

    /// Zeroes the accumulated influx of every processing cell.
    pub fn reset_stm(&mut self) {
        for cell in self.cells.iter_mut().filter(|c| c.is_processing()) {
            cell.stm = StmState::default();
        }
    }

    /// True when the occupancy index agrees exactly with cell positions.
    pub fn occupancy_consistent(&self) -> bool {
        let occupied = self.occupancy.iter().filter(|o| o.is_some()).count();
        occupied == self.cells.len()
            && self
                .cells
                .iter()
                .all(|c| self.occupant(c.pos) == Some(c.id))
    }

    /// Re-labels the lock flag when restoring a snapshot.
    pub fn with_lock(mut self, locked: bool) -> Self {
        self.locked = locked;
        self
    }
}
