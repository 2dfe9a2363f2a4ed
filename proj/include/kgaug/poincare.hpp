#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "kgaug/graph.hpp"
#include "kgaug/hierarchy.hpp"

namespace kgaug {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class BallError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Geodesic distance in the Poincare ball. Throws BallError if either
/// argument has norm >= 1.
double poincare_distance(std::span<const double> u, std::span<const double> v);
double poincare_distance(const Vector& u, const Vector& v);

/// Euclidean gradient of d(u, v) with respect to u. Zero at u == v, where the
/// distance is not differentiable.
Vector poincare_distance_grad(const Vector& u, const Vector& v);

/// Metric rescaling (1 - |x|^2)^2 / 4 that turns a Euclidean gradient into a
/// Riemannian one.
double riemannian_scale(double squared_norm);

/// One row per hierarchy node, each strictly inside the open unit ball.
class PoincareModel {
 public:
  PoincareModel() = default;
  PoincareModel(std::size_t nodes, std::size_t dim) : vectors_(RowMatrix::Zero(nodes, dim)) {}

  std::size_t node_count() const { return static_cast<std::size_t>(vectors_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(vectors_.cols()); }

  Vector vec(NodeId n) const { return vectors_.row(n).transpose(); }
  auto row(NodeId n) { return vectors_.row(n); }
  auto row(NodeId n) const { return vectors_.row(n); }
  double distance(NodeId a, NodeId b) const;
  double max_norm() const;

  RowMatrix& data() { return vectors_; }
  const RowMatrix& data() const { return vectors_; }

 private:
  RowMatrix vectors_;
};

struct TrainConfig {
  std::size_t dim = 100;
  double lr = 0.3;
  std::size_t epochs = 300;
  std::size_t neg_count = 10;
  std::size_t burn_in_epochs = 20;
  std::size_t batch_size = 10;
  std::uint64_t seed = 42;
  double ball_margin = 1e-5;

  void validate() const;
};

/// One term of the hyponymy softmax loss: the child is pulled towards its
/// parent against the candidate set `negatives` (the parent is added to the
/// candidate set if missing).
struct HyponymyExample {
  NodeId child = 0;
  NodeId parent = 0;
  std::vector<NodeId> negatives;
};

using SparseGrads = std::map<NodeId, Vector>;

struct LossAndGrad {
  double loss = 0.0;
  SparseGrads grads;
};

/// loss = sum over examples of -log softmax(-d) at the parent.
LossAndGrad loss_and_grad(const PoincareModel& model, std::span<const HyponymyExample> batch);

/// x <- proj(x - lr * (1-|x|^2)^2/4 * grad); proj rescales anything with
/// |x| >= 1 - margin back to norm 1 - margin.
void riemannian_step(PoincareModel& model, const SparseGrads& grads, double lr,
                     double ball_margin = 1e-5);

void project_to_ball(Eigen::Ref<Vector> x, double ball_margin);

struct TrainLog {
  std::vector<double> epoch_loss;
  double max_norm_seen = 0.0;  // largest norm after any optimizer step
};

/// Deterministic single-threaded Riemannian SGD over every (child, parent)
/// edge of the hierarchy, entity->class and class->class alike.
PoincareModel train(const ClassHierarchy& hierarchy, const TrainConfig& cfg,
                    TrainLog* log = nullptr);

/// Vector of the class node assigned to `entity`.
Vector lookup_class_embedding(const PoincareModel& model, const KnowledgeGraph& g,
                              EntityId entity, const ClassHierarchy& hierarchy);

struct ReconstructionMetrics {
  double mean_rank = 0.0;    // rank of the parent among {parent} + sampled non-ancestors
  double closer_rate = 0.0;  // share of comparisons with d(child,parent) < d(child,x)
  std::size_t pairs = 0;
};

ReconstructionMetrics evaluate_reconstruction(const PoincareModel& model,
                                              const ClassHierarchy& hierarchy,
                                              std::size_t negatives, std::uint64_t seed);

/// `label\tv1\t...\tvd` per node in node order.
void write_embeddings(std::ostream& os, const PoincareModel& model,
                      const ClassHierarchy& hierarchy);
void write_embedding_header(std::ostream& os, const PoincareModel& model, const TrainConfig& cfg);

}  // namespace kgaug
