#pragma once

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "kreinmap/errors.hpp"

namespace kreinmap {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

// Uniform grid on [0,1] with N cells and trapezoid weights.
class GridSpec {
 public:
  explicit GridSpec(int cells) : cells_(cells) {
    if (cells < 8 || cells % 2 != 0)
      throw InputError("grid cell count must be even and >= 8, got " + std::to_string(cells));
    weights_.assign(cells + 1, 1.0 / cells);
    weights_.front() = 0.5 / cells;
    weights_.back() = 0.5 / cells;
  }

  int cells() const noexcept { return cells_; }
  int nodes() const noexcept { return cells_ + 1; }
  double step() const noexcept { return 1.0 / cells_; }
  double node(int i) const noexcept { return static_cast<double>(i) / cells_; }
  double weight(int i) const noexcept { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  GridSpec refined() const { return GridSpec(2 * cells_); }

  bool operator==(const GridSpec& other) const noexcept { return cells_ == other.cells_; }

 private:
  int cells_;
  std::vector<double> weights_;
};

namespace detail {

inline bool all_finite(const Mat& m) {
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const cplx v = m.data()[k];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

inline void check_blocks(const std::vector<Mat>& vals, std::size_t count, int r, const char* what) {
  if (vals.size() != count)
    throw InputError(std::string(what) + ": expected " + std::to_string(count) + " samples, got " +
                     std::to_string(vals.size()));
  for (const Mat& m : vals) {
    if (m.rows() != r || m.cols() != r) throw InputError(std::string(what) + ": sample has wrong block size");
    if (!all_finite(m)) throw InputError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace detail

// h sampled on [-1,1] with step 1/(2N): values[k] = h(-1 + k/(2N)).
// h may jump at the origin: origin_plus/origin_minus hold h(0+) and h(0-), and the
// sample at 0 is their mean. Without a jump both equal the sample at 0.
class Accelerant {
 public:
  Accelerant(int r, GridSpec grid, std::vector<Mat> values) : r_(r), grid_(std::move(grid)), values_(std::move(values)) {
    if (r < 1) throw InputError("accelerant block dimension must be positive");
    detail::check_blocks(values_, static_cast<std::size_t>(4 * grid_.cells() + 1), r_, "accelerant");
    plus0_ = minus0_ = values_[2 * grid_.cells()];
  }

  Accelerant(int r, GridSpec grid, std::vector<Mat> values, Mat origin_plus, Mat origin_minus)
      : Accelerant(r, std::move(grid), std::move(values)) {
    detail::check_blocks({origin_plus, origin_minus}, 2, r_, "accelerant origin limits");
    plus0_ = std::move(origin_plus);
    minus0_ = std::move(origin_minus);
    values_[2 * grid_.cells()] = 0.5 * (plus0_ + minus0_);
  }

  static Accelerant zero(int r, const GridSpec& grid) {
    return Accelerant(r, grid, std::vector<Mat>(4 * grid.cells() + 1, Mat::Zero(r, r)));
  }

  static Accelerant sample(int r, const GridSpec& grid, const std::function<Mat(double)>& f) {
    std::vector<Mat> v;
    v.reserve(4 * grid.cells() + 1);
    for (int k = 0; k <= 4 * grid.cells(); ++k) v.push_back(f(-1.0 + k / (2.0 * grid.cells())));
    return Accelerant(r, grid, std::move(v));
  }

  static Accelerant scalar(const GridSpec& grid, const std::function<cplx(double)>& f) {
    return sample(1, grid, [&](double x) { return Mat::Constant(1, 1, f(x)); });
  }

  int r() const noexcept { return r_; }
  const GridSpec& grid() const noexcept { return grid_; }
  int size() const noexcept { return static_cast<int>(values_.size()); }
  const Mat& operator[](int k) const { return values_[k]; }
  const std::vector<Mat>& values() const noexcept { return values_; }
  double abscissa(int k) const noexcept { return -1.0 + k / (2.0 * grid_.cells()); }
  // h at offset/(2N).
  const Mat& at_half_steps(int offset) const { return values_[2 * grid_.cells() + offset]; }

  const Mat& origin_plus() const noexcept { return plus0_; }
  const Mat& origin_minus() const noexcept { return minus0_; }
  Mat origin_jump() const { return plus0_ - minus0_; }
  bool has_jump() const { return (plus0_ - minus0_).cwiseAbs().maxCoeff() != 0.0; }

 private:
  int r_;
  GridSpec grid_;
  std::vector<Mat> values_;
  Mat plus0_, minus0_;
};

// Off-diagonal potential Q = [[0, q_plus], [q_minus, 0]] at the nodes of [0,1].
class Potential {
 public:
  Potential(int r, GridSpec grid, std::vector<Mat> q_plus, std::vector<Mat> q_minus)
      : r_(r), grid_(std::move(grid)), q_plus_(std::move(q_plus)), q_minus_(std::move(q_minus)) {
    if (r < 1) throw InputError("potential block dimension must be positive");
    detail::check_blocks(q_plus_, static_cast<std::size_t>(grid_.nodes()), r_, "potential q_plus");
    detail::check_blocks(q_minus_, static_cast<std::size_t>(grid_.nodes()), r_, "potential q_minus");
  }

  static Potential zero(int r, const GridSpec& grid) {
    std::vector<Mat> z(grid.nodes(), Mat::Zero(r, r));
    return Potential(r, grid, z, z);
  }

  static Potential sample(int r, const GridSpec& grid, const std::function<Mat(double)>& plus,
                          const std::function<Mat(double)>& minus) {
    std::vector<Mat> p, m;
    for (int i = 0; i < grid.nodes(); ++i) {
      p.push_back(plus(grid.node(i)));
      m.push_back(minus(grid.node(i)));
    }
    return Potential(r, grid, std::move(p), std::move(m));
  }

  static Potential scalar(const GridSpec& grid, const std::function<cplx(double)>& plus,
                          const std::function<cplx(double)>& minus) {
    return sample(
        1, grid, [&](double x) { return Mat::Constant(1, 1, plus(x)); },
        [&](double x) { return Mat::Constant(1, 1, minus(x)); });
  }

  int r() const noexcept { return r_; }
  const GridSpec& grid() const noexcept { return grid_; }
  const Mat& q_plus(int i) const { return q_plus_[i]; }
  const Mat& q_minus(int i) const { return q_minus_[i]; }
  const std::vector<Mat>& q_plus() const noexcept { return q_plus_; }
  const std::vector<Mat>& q_minus() const noexcept { return q_minus_; }

  Mat full(int i) const {
    Mat q = Mat::Zero(2 * r_, 2 * r_);
    q.topRightCorner(r_, r_) = q_plus_[i];
    q.bottomLeftCorner(r_, r_) = q_minus_[i];
    return q;
  }

 private:
  int r_;
  GridSpec grid_;
  std::vector<Mat> q_plus_;
  std::vector<Mat> q_minus_;
};

enum class Support { lower, upper, full };

inline const char* to_string(Support s) {
  switch (s) {
    case Support::lower: return "lower";
    case Support::upper: return "upper";
    default: return "full";
  }
}

inline bool in_support(Support s, int i, int j) noexcept {
  switch (s) {
    case Support::lower: return j <= i;
    case Support::upper: return j >= i;
    default: return true;
  }
}

// n x n block kernel on the (N+1)^2 node grid, stored as one (N+1)n square matrix.
class Kernel2D {
 public:
  Kernel2D(int n, GridSpec grid, Support support)
      : n_(n), grid_(std::move(grid)), support_(support), values_(Mat::Zero(grid_.nodes() * n, grid_.nodes() * n)) {}

  Kernel2D(int n, GridSpec grid, Support support, Mat values)
      : n_(n), grid_(std::move(grid)), support_(support), values_(std::move(values)) {
    if (values_.rows() != grid_.nodes() * n || values_.cols() != grid_.nodes() * n)
      throw InputError("kernel values have wrong dimensions");
    if (!detail::all_finite(values_)) throw InputError("kernel: non-finite entry");
    enforce_support();
  }

  static Kernel2D sample(int n, const GridSpec& grid, Support support, const std::function<Mat(double, double)>& f) {
    Kernel2D k(n, grid, support);
    for (int i = 0; i < grid.nodes(); ++i)
      for (int j = 0; j < grid.nodes(); ++j)
        if (in_support(support, i, j)) k.block(i, j) = f(grid.node(i), grid.node(j));
    return k;
  }

  int n() const noexcept { return n_; }
  const GridSpec& grid() const noexcept { return grid_; }
  Support support() const noexcept { return support_; }
  const Mat& values() const noexcept { return values_; }
  Mat& values() noexcept { return values_; }

  Eigen::Block<Mat> block(int i, int j) { return values_.block(i * n_, j * n_, n_, n_); }
  Eigen::Block<const Mat> block(int i, int j) const { return values_.block(i * n_, j * n_, n_, n_); }

  void enforce_support() {
    if (support_ == Support::full) return;
    const int nodes = grid_.nodes();
    for (int i = 0; i < nodes; ++i)
      for (int j = 0; j < nodes; ++j)
        if (!in_support(support_, i, j)) block(i, j).setZero();
  }

  Kernel2D with_support(Support s) const {
    Kernel2D k(n_, grid_, s);
    k.values_ = values_;
    k.enforce_support();
    return k;
  }

 private:
  int n_;
  GridSpec grid_;
  Support support_;
  Mat values_;
};

inline Support combined_support(Support a, Support b) { return a == b ? a : Support::full; }

inline void require_compatible(const Kernel2D& a, const Kernel2D& b) {
  if (!(a.grid() == b.grid()) || a.n() != b.n()) throw InputError("kernel grid or block size mismatch");
}

inline Kernel2D operator+(const Kernel2D& a, const Kernel2D& b) {
  require_compatible(a, b);
  return Kernel2D(a.n(), a.grid(), combined_support(a.support(), b.support()), a.values() + b.values());
}

inline Kernel2D operator-(const Kernel2D& a, const Kernel2D& b) {
  require_compatible(a, b);
  return Kernel2D(a.n(), a.grid(), combined_support(a.support(), b.support()), a.values() - b.values());
}

inline Kernel2D operator*(cplx c, const Kernel2D& a) { return Kernel2D(a.n(), a.grid(), a.support(), c * a.values()); }

struct StructuralConstants {
  int r;
  Mat J, B, a_col, a_row;

  static StructuralConstants make(int r) {
    StructuralConstants s{r, Mat::Zero(2 * r, 2 * r), Mat::Zero(2 * r, 2 * r), Mat::Zero(2 * r, r), Mat::Zero(r, 2 * r)};
    const Mat id = Mat::Identity(r, r);
    s.J.topLeftCorner(r, r) = -kI * id;
    s.J.bottomRightCorner(r, r) = kI * id;
    s.B.topRightCorner(r, r) = id;
    s.B.bottomLeftCorner(r, r) = id;
    s.a_col.topRows(r) = id;
    s.a_col.bottomRows(r) = id;
    s.a_row.leftCols(r) = id;
    s.a_row.rightCols(r) = -id;
    return s;
  }
};

struct SpectralParameter {
  cplx lambda;

  explicit SpectralParameter(cplx l) : lambda(l) {
    if (!std::isfinite(l.real()) || !std::isfinite(l.imag())) throw InputError("spectral parameter must be finite");
  }
};

// Free solution (e^{i lambda x} I ; e^{-i lambda x} I).
inline Mat free_solution(int r, double x, cplx lambda) {
  Mat phi(2 * r, r);
  phi.topRows(r) = std::exp(kI * lambda * x) * Mat::Identity(r, r);
  phi.bottomRows(r) = std::exp(-kI * lambda * x) * Mat::Identity(r, r);
  return phi;
}

struct DiagnosticEntry {
  std::string name;
  double value;
  double tolerance;
  bool asserted;

  bool passed() const { return std::isfinite(value) && (!asserted || value <= tolerance); }
};

class DiagnosticReport {
 public:
  void add(std::string name, double value, double tolerance, bool asserted = true) {
    entries_.push_back({std::move(name), value, tolerance, asserted});
  }

  void note(std::string name, double value) { add(std::move(name), value, 0.0, false); }

  void merge(const DiagnosticReport& other, const std::string& prefix = "") {
    for (const auto& e : other.entries_) entries_.push_back({prefix + e.name, e.value, e.tolerance, e.asserted});
  }

  bool all_passed() const {
    for (const auto& e : entries_)
      if (!e.passed()) return false;
    return true;
  }

  const DiagnosticEntry* find(const std::string& name) const {
    for (const auto& e : entries_)
      if (e.name == name) return &e;
    return nullptr;
  }

  double value(const std::string& name) const {
    const DiagnosticEntry* e = find(name);
    if (!e) throw Error("no diagnostic entry named " + name);
    return e->value;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& e : entries_)
      if (!e.passed()) out.push_back(e.name);
    return out;
  }

  const std::vector<DiagnosticEntry>& entries() const noexcept { return entries_; }

  int grid_cells = 0;
  double runtime_ms = 0.0;

 private:
  std::vector<DiagnosticEntry> entries_;
};

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// ---- elementary transforms ----

inline Accelerant sharp(const Accelerant& h) {
  std::vector<Mat> v(h.values().rbegin(), h.values().rend());
  return Accelerant(h.r(), h.grid(), std::move(v), h.origin_minus(), h.origin_plus());
}

inline Accelerant block_embed_H(const Accelerant& h) {
  const int r = h.r();
  const int last = h.size() - 1;
  std::vector<Mat> v;
  v.reserve(h.size());
  for (int k = 0; k <= last; ++k) {
    Mat m = Mat::Zero(2 * r, 2 * r);
    m.topLeftCorner(r, r) = h[k];
    m.bottomRightCorner(r, r) = h[last - k];
    v.push_back(std::move(m));
  }
  Mat plus = Mat::Zero(2 * r, 2 * r), minus = Mat::Zero(2 * r, 2 * r);
  plus.topLeftCorner(r, r) = h.origin_plus();
  plus.bottomRightCorner(r, r) = h.origin_minus();
  minus.topLeftCorner(r, r) = h.origin_minus();
  minus.bottomRightCorner(r, r) = h.origin_plus();
  return Accelerant(2 * r, h.grid(), std::move(v), std::move(plus), std::move(minus));
}

inline Potential potential_adjoint(const Potential& q) {
  std::vector<Mat> p, m;
  for (int i = 0; i < q.grid().nodes(); ++i) {
    p.push_back(q.q_minus(i).adjoint());
    m.push_back(q.q_plus(i).adjoint());
  }
  return Potential(q.r(), q.grid(), std::move(p), std::move(m));
}

inline Potential assemble_potential(const std::vector<Mat>& top_right, const std::vector<Mat>& bottom_left) {
  if (top_right.size() != bottom_left.size())
    throw InputError("potential blocks have different lengths");
  if (top_right.size() < 2) throw InputError("potential needs at least two nodes");
  const int r = static_cast<int>(top_right.front().rows());
  return Potential(r, GridSpec(static_cast<int>(top_right.size()) - 1), top_right, bottom_left);
}

// Build a potential from full 2r x 2r samples; diagonal blocks must vanish.
inline Potential potential_from_full(const std::vector<Mat>& full) {
  if (full.empty()) throw InputError("empty potential");
  const int r2 = static_cast<int>(full.front().rows());
  if (r2 % 2 != 0) throw InputError("full potential must have even size");
  const int r = r2 / 2;
  std::vector<Mat> p, m;
  for (const Mat& q : full) {
    if (q.rows() != r2 || q.cols() != r2) throw InputError("full potential sample has wrong size");
    if (q.topLeftCorner(r, r).cwiseAbs().maxCoeff() != 0.0 || q.bottomRightCorner(r, r).cwiseAbs().maxCoeff() != 0.0)
      throw InputError("potential does not anticommute with J: diagonal blocks are nonzero");
    p.push_back(q.topRightCorner(r, r));
    m.push_back(q.bottomLeftCorner(r, r));
  }
  return assemble_potential(p, m);
}

// Exact restriction from a nested finer grid (N_fine = N * 2^k).
inline Accelerant decimate(const Accelerant& h, int cells) {
  const int fine = h.grid().cells();
  if (cells == fine) return h;
  if (cells <= 0 || fine % cells != 0 || ((fine / cells) & (fine / cells - 1)) != 0)
    throw InputError("cannot resample accelerant from N=" + std::to_string(fine) + " to N=" + std::to_string(cells) +
                     " (grids not nested)");
  const int stride = fine / cells;
  GridSpec g(cells);
  std::vector<Mat> v;
  for (int k = 0; k <= 4 * cells; ++k) v.push_back(h[k * stride]);
  return Accelerant(h.r(), g, std::move(v), h.origin_plus(), h.origin_minus());
}

inline Potential decimate(const Potential& q, int cells) {
  const int fine = q.grid().cells();
  if (cells == fine) return q;
  if (cells <= 0 || fine % cells != 0 || ((fine / cells) & (fine / cells - 1)) != 0)
    throw InputError("cannot resample potential from N=" + std::to_string(fine) + " to N=" + std::to_string(cells) +
                     " (grids not nested)");
  const int stride = fine / cells;
  std::vector<Mat> p, m;
  for (int i = 0; i <= cells; ++i) {
    p.push_back(q.q_plus(i * stride));
    m.push_back(q.q_minus(i * stride));
  }
  return Potential(q.r(), GridSpec(cells), std::move(p), std::move(m));
}

inline Accelerant operator-(const Accelerant& a, const Accelerant& b) {
  if (!(a.grid() == b.grid()) || a.r() != b.r()) throw InputError("accelerant grid mismatch");
  std::vector<Mat> v;
  for (int k = 0; k < a.size(); ++k) v.push_back(a[k] - b[k]);
  return Accelerant(a.r(), a.grid(), std::move(v), a.origin_plus() - b.origin_plus(), a.origin_minus() - b.origin_minus());
}

inline Accelerant operator+(const Accelerant& a, const Accelerant& b) {
  if (!(a.grid() == b.grid()) || a.r() != b.r()) throw InputError("accelerant grid mismatch");
  std::vector<Mat> v;
  for (int k = 0; k < a.size(); ++k) v.push_back(a[k] + b[k]);
  return Accelerant(a.r(), a.grid(), std::move(v), a.origin_plus() + b.origin_plus(), a.origin_minus() + b.origin_minus());
}

inline Potential operator-(const Potential& a, const Potential& b) {
  if (!(a.grid() == b.grid()) || a.r() != b.r()) throw InputError("potential grid mismatch");
  std::vector<Mat> p, m;
  for (int i = 0; i < a.grid().nodes(); ++i) {
    p.push_back(a.q_plus(i) - b.q_plus(i));
    m.push_back(a.q_minus(i) - b.q_minus(i));
  }
  return Potential(a.r(), a.grid(), std::move(p), std::move(m));
}

inline Potential operator+(const Potential& a, const Potential& b) {
  if (!(a.grid() == b.grid()) || a.r() != b.r()) throw InputError("potential grid mismatch");
  std::vector<Mat> p, m;
  for (int i = 0; i < a.grid().nodes(); ++i) {
    p.push_back(a.q_plus(i) + b.q_plus(i));
    m.push_back(a.q_minus(i) + b.q_minus(i));
  }
  return Potential(a.r(), a.grid(), std::move(p), std::move(m));
}

}  // namespace kreinmap
