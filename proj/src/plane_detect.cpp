#include "echowall/plane_detect.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace echowall {

namespace {

// Minimal kd-tree for k-nearest-neighbor queries on 3D points.
class KdTree {
 public:
  explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
    order_.resize(points.size());
    std::iota(order_.begin(), order_.end(), 0);
    if (!order_.empty()) root_ = build(0, static_cast<int>(order_.size()), 0);
  }

  // Indices of the k nearest points to the query (including the query point
  // itself when it belongs to the cloud).
  std::vector<int> knn(const Vec3& query, int k) const {
    Heap heap;
    search(root_, query, k, heap);
    std::vector<int> out(heap.size());
    for (int i = static_cast<int>(out.size()) - 1; i >= 0; --i) {
      out[i] = heap.top().second;
      heap.pop();
    }
    return out;
  }

 private:
  using Entry = std::pair<double, int>;  // (squared distance, index)
  using Heap = std::priority_queue<Entry>;

  struct Node {
    int point = -1;
    int axis = 0;
    int left = -1;
    int right = -1;
  };

  int build(int lo, int hi, int depth) {
    if (lo >= hi) return -1;
    const int axis = depth % 3;
    const int mid = (lo + hi) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid, order_.begin() + hi,
                     [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
    Node node;
    node.point = order_[mid];
    node.axis = axis;
    const int self = static_cast<int>(nodes_.size());
    nodes_.push_back(node);
    nodes_[self].left = build(lo, mid, depth + 1);
    nodes_[self].right = build(mid + 1, hi, depth + 1);
    return self;
  }

  void search(int idx, const Vec3& query, int k, Heap& heap) const {
    if (idx < 0) return;
    const Node& node = nodes_[idx];
    const double d2 = (points_[node.point] - query).squaredNorm();
    if (static_cast<int>(heap.size()) < k) {
      heap.emplace(d2, node.point);
    } else if (d2 < heap.top().first) {
      heap.pop();
      heap.emplace(d2, node.point);
    }
    const double delta = query[node.axis] - points_[node.point][node.axis];
    const int near = delta < 0.0 ? node.left : node.right;
    const int far = delta < 0.0 ? node.right : node.left;
    search(near, query, k, heap);
    if (static_cast<int>(heap.size()) < k || delta * delta < heap.top().first)
      search(far, query, k, heap);
  }

  const std::vector<Vec3>& points_;
  std::vector<int> order_;
  std::vector<Node> nodes_;
  int root_ = -1;
};

struct FittedPlane {
  Vec3 normal = Vec3::UnitZ();
  double distance = 0.0;
  double rms = 0.0;
};

// Total least squares: normal = smallest eigenvector of the centered
// covariance, distance from the centroid, sign-normalized to distance >= 0.
FittedPlane fit_plane_tls(const std::vector<Vec3>& points,
                          const std::vector<int>& idx) {
  Vec3 centroid = Vec3::Zero();
  for (int i : idx) centroid += points[i];
  centroid /= static_cast<double>(idx.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (int i : idx) {
    const Vec3 d = points[i] - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);

  FittedPlane fit;
  fit.normal = eig.eigenvectors().col(0).normalized();
  double rho = fit.normal.dot(centroid);
  if (rho < 0.0) {
    fit.normal = -fit.normal;
    rho = -rho;
  }
  fit.distance = rho;

  double ss = 0.0;
  for (int i : idx) {
    const double r = fit.normal.dot(points[i]) - rho;
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / static_cast<double>(idx.size()));
  return fit;
}

struct Cluster {
  std::vector<int> indices;
  FittedPlane fit;
};

}  // namespace

std::vector<DetectedPlane> detect_planes(const PointCloud& cloud,
                                         const DetectorParams& params) {
  if (params.min_cluster_size < 3)
    throw std::invalid_argument("min_cluster_size must be >= 3");
  const int n = static_cast<int>(cloud.size());
  if (n < params.min_cluster_size) return {};

  const std::vector<Vec3>& pts = cloud.points;
  const KdTree tree(pts);
  const int k = std::min(params.neighborhood_k, n);

  // Per-point normals and curvature from the kNN covariance.
  std::vector<Vec3> normals(n);
  std::vector<double> curvature(n);
  std::vector<std::vector<int>> neighbors(n);
  for (int i = 0; i < n; ++i) {
    neighbors[i] = tree.knn(pts[i], k);
    Vec3 centroid = Vec3::Zero();
    for (int j : neighbors[i]) centroid += pts[j];
    centroid /= static_cast<double>(neighbors[i].size());
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int j : neighbors[i]) {
      const Vec3 d = pts[j] - centroid;
      cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    normals[i] = eig.eigenvectors().col(0).normalized();
    const double trace = eig.eigenvalues().sum();
    curvature[i] = trace > 0.0 ? eig.eigenvalues()(0) / trace : 0.0;
  }

  // Region growing, flattest seeds first.
  std::vector<int> seeds(n);
  std::iota(seeds.begin(), seeds.end(), 0);
  std::sort(seeds.begin(), seeds.end(), [&](int a, int b) {
    if (curvature[a] != curvature[b]) return curvature[a] < curvature[b];
    return a < b;
  });

  const double cos_tol = std::cos(deg2rad(params.normal_angle_tol_deg));
  std::vector<char> assigned(n, 0);
  std::vector<Cluster> clusters;

  for (int seed : seeds) {
    if (assigned[seed]) continue;
    std::vector<int> members;
    std::queue<int> frontier;
    frontier.push(seed);
    assigned[seed] = 1;
    const Vec3 seed_normal = normals[seed];
    const double seed_rho = seed_normal.dot(pts[seed]);

    while (!frontier.empty()) {
      const int cur = frontier.front();
      frontier.pop();
      members.push_back(cur);
      for (int nb : neighbors[cur]) {
        if (assigned[nb]) continue;
        if (std::fabs(normals[nb].dot(seed_normal)) < cos_tol) continue;
        if (std::fabs(seed_normal.dot(pts[nb]) - seed_rho) > params.plane_dist_tol)
          continue;
        assigned[nb] = 1;
        frontier.push(nb);
      }
    }
    if (static_cast<int>(members.size()) < 3) continue;
    Cluster c;
    c.indices = std::move(members);
    c.fit = fit_plane_tls(pts, c.indices);
    clusters.push_back(std::move(c));
  }

  // Merge clusters that describe the same plane.
  const double merge_cos = std::cos(deg2rad(params.merge_angle_tol_deg));
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t a = 0; a < clusters.size() && !merged; ++a) {
      for (std::size_t b = a + 1; b < clusters.size() && !merged; ++b) {
        const FittedPlane& fa = clusters[a].fit;
        const FittedPlane& fb = clusters[b].fit;
        if (std::fabs(fa.normal.dot(fb.normal)) < merge_cos) continue;
        if (std::fabs(fa.distance - fb.distance) > params.merge_dist_tol) continue;
        clusters[a].indices.insert(clusters[a].indices.end(),
                                   clusters[b].indices.begin(),
                                   clusters[b].indices.end());
        clusters[a].fit = fit_plane_tls(pts, clusters[a].indices);
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(b));
        merged = true;
      }
    }
  }

  std::vector<DetectedPlane> out;
  for (const Cluster& c : clusters) {
    if (static_cast<int>(c.indices.size()) < params.min_cluster_size) continue;
    DetectedPlane dp;
    dp.plane.normal = c.fit.normal;
    dp.plane.distance = c.fit.distance;
    dp.inlier_count = static_cast<int>(c.indices.size());
    dp.rms_residual = c.fit.rms;
    out.push_back(dp);
  }
  std::sort(out.begin(), out.end(), [](const DetectedPlane& a, const DetectedPlane& b) {
    if (a.inlier_count != b.inlier_count) return a.inlier_count > b.inlier_count;
    return a.plane.distance < b.plane.distance;
  });
  return out;
}

SplitPlanes split_horizontal_vertical(const std::vector<DetectedPlane>& planes,
                                      double tol_deg) {
  SplitPlanes out;
  const double sin_tol = std::sin(deg2rad(tol_deg));
  const double cos_tol = std::cos(deg2rad(tol_deg));
  for (const DetectedPlane& p : planes) {
    const double nz = std::fabs(p.plane.normal.z());
    if (nz <= sin_tol) {
      out.vertical.push_back(p);
    } else if (nz >= cos_tol) {
      out.horizontal.push_back(p);
    } else {
      out.discarded.push_back(p);
    }
  }
  return out;
}

}  // namespace echowall
