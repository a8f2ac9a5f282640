#include "zsspec/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "zsspec/errors.hpp"

namespace zs {

AnchorSet::AnchorSet(std::vector<cplx> points) : pts_(std::move(points)) {
  if (pts_.empty()) fail(ErrorCode::InvalidInput, "anchor set is empty");
  for (std::size_t i = 0; i < pts_.size(); ++i) {
    if (!(pts_[i].imag() > 0.0)) fail(ErrorCode::InvalidInput, "anchor below real axis");
    if (!std::isfinite(pts_[i].real()) || !std::isfinite(pts_[i].imag()))
      fail(ErrorCode::InvalidInput, "anchor is not finite");
    for (std::size_t j = 0; j < i; ++j)
      if (pts_[i] == pts_[j]) fail(ErrorCode::InvalidInput, "duplicate anchor");
  }
}

double AnchorSet::diameter() const {
  double d = 0.0;
  for (const cplx& a : pts_)
    for (const cplx& b : pts_) d = std::max({d, std::abs(a - b), std::abs(a - std::conj(b))});
  return d;
}

RealPoly AnchorSet::denominator() const {
  RealPoly d{1.0};
  for (const cplx& e : pts_) d = polymul(d, conjugate_pair_poly(e));
  return d;
}

AnchorSet AnchorSet::translated(double a) const {
  std::vector<cplx> p = pts_;
  for (auto& z : p) z += a;
  return AnchorSet(std::move(p));
}

AnchorSet AnchorSet::scaled(double lambda) const {
  std::vector<cplx> p = pts_;
  for (auto& z : p) z *= lambda;
  return AnchorSet(std::move(p));
}

double Arc::length() const {
  double L = 0.0;
  for (std::size_t i = 1; i < samples.size(); ++i) L += std::abs(samples[i] - samples[i - 1]);
  return L;
}

ConnectivityMatrix::ConnectivityMatrix(std::size_t n_anchors)
    : n_(n_anchors), bits_((n_anchors + 1) * (n_anchors + 1), 0) {
  for (std::size_t i = 1; i <= n_; ++i) set(i, i);
}

ConnectivityMatrix ConnectivityMatrix::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.size() < 2) fail(ErrorCode::InvalidInput, "connectivity matrix needs N+1 >= 2 rows");
  ConnectivityMatrix m(rows.size() - 1);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) fail(ErrorCode::InvalidInput, "connectivity matrix is not square");
    for (std::size_t j = 0; j < rows.size(); ++j) {
      if (rows[i][j] != rows[j][i]) fail(ErrorCode::InvalidInput, "connectivity matrix is not symmetric");
      if (i != j && rows[i][j]) m.set(i, j);
    }
  }
  return m;
}

void ConnectivityMatrix::set(std::size_t i, std::size_t j, bool v) {
  bits_[i * (n_ + 1) + j] = v;
  bits_[j * (n_ + 1) + i] = v;
}

bool ConnectivityMatrix::dominates(const ConnectivityMatrix& other) const {
  if (other.n_ != n_) fail(ErrorCode::InvalidInput, "connectivity matrices differ in size");
  for (std::size_t i = 0; i <= n_; ++i)
    for (std::size_t j = 0; j <= n_; ++j)
      if (i != j && other(i, j) && !(*this)(i, j)) return false;
  return true;
}

std::vector<std::vector<int>> ConnectivityMatrix::rows() const {
  std::vector<std::vector<int>> r(n_ + 1, std::vector<int>(n_ + 1, 0));
  for (std::size_t i = 0; i <= n_; ++i)
    for (std::size_t j = 0; j <= n_; ++j) r[i][j] = (*this)(i, j) ? 1 : 0;
  return r;
}

std::string ConnectivityMatrix::to_string() const {
  std::ostringstream os;
  for (std::size_t i = 0; i <= n_; ++i) {
    for (std::size_t j = 0; j <= n_; ++j) os << ((*this)(i, j) ? '1' : '0');
    if (i < n_) os << '/';
  }
  return os.str();
}

double segment_distance(cplx p, cplx a, cplx b) {
  cplx d = b - a;
  double L2 = std::norm(d);
  if (L2 == 0.0) return std::abs(p - a);
  double t = std::clamp(((p - a) * std::conj(d)).real() / L2, 0.0, 1.0);
  return std::abs(p - (a + t * d));
}

namespace {

double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

double seg_seg_distance(cplx a, cplx b, cplx c, cplx d) {
  double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return 0.0;
  return std::min({segment_distance(a, c, d), segment_distance(b, c, d), segment_distance(c, a, b),
                   segment_distance(d, a, b)});
}

struct Box {
  double x0, x1, y0, y1;
};

Box bbox(const Arc& a) {
  Box b{1e300, -1e300, 1e300, -1e300};
  for (const cplx& z : a.samples) {
    b.x0 = std::min(b.x0, z.real());
    b.x1 = std::max(b.x1, z.real());
    b.y0 = std::min(b.y0, z.imag());
    b.y1 = std::max(b.y1, z.imag());
  }
  return b;
}

bool arcs_touch(const Arc& A, const Arc& B, double tol) {
  const Box a = bbox(A), b = bbox(B);
  if (a.x0 > b.x1 + tol || b.x0 > a.x1 + tol || a.y0 > b.y1 + tol || b.y0 > a.y1 + tol) return false;
  if (A.samples.size() == 1 || B.samples.size() == 1) {
    const Arc& P = A.samples.size() == 1 ? A : B;
    const Arc& O = A.samples.size() == 1 ? B : A;
    return distance_to(O, P.samples[0]) < tol;
  }
  for (std::size_t i = 1; i < A.samples.size(); ++i) {
    cplx a0 = A.samples[i - 1], a1 = A.samples[i];
    double ax0 = std::min(a0.real(), a1.real()) - tol, ax1 = std::max(a0.real(), a1.real()) + tol;
    double ay0 = std::min(a0.imag(), a1.imag()) - tol, ay1 = std::max(a0.imag(), a1.imag()) + tol;
    if (ax0 > b.x1 || ax1 < b.x0 || ay0 > b.y1 || ay1 < b.y0) continue;
    for (std::size_t j = 1; j < B.samples.size(); ++j) {
      cplx b0 = B.samples[j - 1], b1 = B.samples[j];
      if (std::max(b0.real(), b1.real()) < ax0 || std::min(b0.real(), b1.real()) > ax1) continue;
      if (std::max(b0.imag(), b1.imag()) < ay0 || std::min(b0.imag(), b1.imag()) > ay1) continue;
      if (seg_seg_distance(a0, a1, b0, b1) < tol) return true;
    }
  }
  return false;
}

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

}  // namespace

double distance_to(const Arc& arc, cplx z) {
  if (arc.samples.empty()) return INFINITY;
  if (arc.samples.size() == 1) return std::abs(z - arc.samples[0]);
  double d = INFINITY;
  for (std::size_t i = 1; i < arc.samples.size(); ++i)
    d = std::min(d, segment_distance(z, arc.samples[i - 1], arc.samples[i]));
  return d;
}

double distance_to(const PolyContinuum& K, cplx z) {
  double d = INFINITY;
  for (const Arc& a : K.arcs) d = std::min(d, distance_to(a, z));
  return d;
}

PolyContinuum make_continuum(std::vector<Arc> arcs, double glue_tol) {
  PolyContinuum K;
  for (const Arc& a : arcs) {
    if (a.samples.empty()) fail(ErrorCode::InvalidInput, "arc without samples");
    for (const cplx& z : a.samples)
      if (z.imag() < -glue_tol) fail(ErrorCode::InvalidInput, "arc sample below real axis");
  }
  K.arcs = std::move(arcs);
  const int n = static_cast<int>(K.arcs.size());
  // index n is a virtual vertex for the real axis
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  auto unite = [&](int a, int b) { parent[find_root(parent, a)] = find_root(parent, b); };
  for (int i = 0; i < n; ++i) {
    for (const cplx& z : K.arcs[i].samples)
      if (z.imag() < glue_tol) {
        unite(i, n);
        break;
      }
    for (int j = 0; j < i; ++j)
      if (arcs_touch(K.arcs[i], K.arcs[j], glue_tol)) unite(i, j);
  }
  const int ground = find_root(parent, n);
  K.component_of_arc.assign(n, -1);
  std::vector<int> label(n + 1, -1);
  bool any_ground = false;
  for (int i = 0; i < n; ++i) any_ground |= find_root(parent, i) == ground;
  if (any_ground) {
    K.has_ground = true;
    label[ground] = 0;
    K.components.emplace_back();
  }
  for (int i = 0; i < n; ++i) {
    int r = find_root(parent, i);
    if (label[r] < 0) {
      label[r] = static_cast<int>(K.components.size());
      K.components.emplace_back();
    }
    K.component_of_arc[i] = label[r];
    K.components[label[r]].push_back(i);
  }
  return K;
}

std::vector<int> anchor_components(const PolyContinuum& K, const AnchorSet& E, double anchor_tol) {
  std::vector<int> host(E.size(), -1);
  for (std::size_t j = 0; j < E.size(); ++j) {
    double best = INFINITY;
    for (std::size_t a = 0; a < K.arcs.size(); ++a) {
      double d = distance_to(K.arcs[a], E[j]);
      if (d < best) {
        best = d;
        host[j] = K.component_of_arc[a];
      }
    }
    if (!(best <= anchor_tol)) {
      std::ostringstream os;
      os << "anchor " << j + 1 << " at distance " << best << " from the continuum";
      fail(ErrorCode::AnchorNotOnContinuum, os.str());
    }
  }
  return host;
}

ConnectivityMatrix connectivity_of(const PolyContinuum& K, const AnchorSet& E, double anchor_tol) {
  if (K.empty()) fail(ErrorCode::EmptyContinuum, "connectivity of an empty continuum");
  const std::vector<int> host = anchor_components(K, E, anchor_tol);
  ConnectivityMatrix M(E.size());
  for (std::size_t i = 0; i < E.size(); ++i) {
    if (K.has_ground && host[i] == 0) M.set(0, i + 1);
    for (std::size_t j = 0; j < i; ++j)
      if (host[i] == host[j]) M.set(i + 1, j + 1);
  }
  return M;
}

bool class_membership(const PolyContinuum& K, const AnchorSet& E, const ConnectivityMatrix& M,
                      double anchor_tol) {
  return connectivity_of(K, E, anchor_tol).dominates(M);
}

bool admissible(const PolyContinuum& K, const AnchorSet& E, double anchor_tol) {
  if (K.empty()) return false;
  std::vector<int> count(K.components.size(), 0);
  try {
    for (int c : anchor_components(K, E, anchor_tol)) ++count[c];
  } catch (const Error&) {
    return false;
  }
  for (std::size_t c = 0; c < K.components.size(); ++c) {
    const bool grounded = K.has_ground && c == 0;
    if (grounded ? count[c] < 1 : count[c] < 2) return false;
  }
  return true;
}

std::vector<cplx> resample(const Arc& arc, double h) {
  std::vector<cplx> out;
  if (arc.samples.empty()) return out;
  out.push_back(arc.samples[0]);
  for (std::size_t i = 1; i < arc.samples.size(); ++i) {
    cplx a = arc.samples[i - 1], b = arc.samples[i];
    int m = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h)));
    for (int k = 1; k <= m; ++k) out.push_back(a + (b - a) * (static_cast<double>(k) / m));
  }
  return out;
}

double hausdorff_distance(const PolyContinuum& K1, const PolyContinuum& K2, double h) {
  if (K1.empty() || K2.empty()) fail(ErrorCode::EmptyContinuum, "Hausdorff distance of an empty set");
  if (h <= 0.0) {
    double diag = 0.0;
    for (const PolyContinuum* K : {&K1, &K2}) {
      Box b{1e300, -1e300, 1e300, -1e300};
      for (const Arc& a : K->arcs) {
        Box c = bbox(a);
        b = {std::min(b.x0, c.x0), std::max(b.x1, c.x1), std::min(b.y0, c.y0), std::max(b.y1, c.y1)};
      }
      diag = std::max(diag, std::hypot(b.x1 - b.x0, b.y1 - b.y0));
    }
    h = diag > 0.0 ? 1e-3 * diag : 1e-3;
  }
  auto directed = [h](const PolyContinuum& A, const PolyContinuum& B) {
    double d = 0.0;
    for (const Arc& a : A.arcs)
      for (const cplx& z : resample(a, h)) d = std::max(d, distance_to(B, z));
    return d;
  };
  return std::max(directed(K1, K2), directed(K2, K1));
}

}  // namespace zs
