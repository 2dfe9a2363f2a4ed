#include "kgaug/fusion.hpp"

#include <cmath>
#include <stdexcept>

namespace kgaug::fusion {

namespace {

Eigen::Index ix(std::size_t v) { return static_cast<Eigen::Index>(v); }

Matrix zeros(const Matrix& like) { return Matrix::Zero(like.rows(), like.cols()); }

void check_alignment(const Alignment& alignment, Eigen::Index entities, Eigen::Index tokens) {
  if (ix(alignment.size()) != entities) {
    throw std::invalid_argument("alignment covers " + std::to_string(alignment.size()) +
                                " entities, input has " + std::to_string(entities));
  }
  for (std::size_t j = 0; j < alignment.size(); ++j) {
    if (!alignment[j]) {
      throw std::invalid_argument("entity " + std::to_string(j) + " has no token alignment");
    }
    if (ix(*alignment[j]) >= tokens) {
      throw std::invalid_argument("entity " + std::to_string(j) + " aligned to token " +
                                  std::to_string(*alignment[j]) + " of " +
                                  std::to_string(tokens));
    }
  }
}

}  // namespace

void FusionDims::validate() const {
  if (d1 < 2 || d2 == 0 || d3 < 2 || d4 == 0) {
    throw std::invalid_argument("fusion widths must be positive (d1, d3 >= 2 for LayerNorm)");
  }
  if (layers == 0) throw std::invalid_argument("injector needs at least one layer");
  if (heads == 0 || d1 % heads != 0) {
    throw std::invalid_argument("d1=" + std::to_string(d1) + " is not divisible by heads=" +
                                std::to_string(heads));
  }
}

FusionDims FusionDims::desk_scale() { return FusionDims{16, 8, 8, 16, 2, 2}; }

InjectorLayerParams InjectorLayerParams::zeros_like() const {
  InjectorLayerParams z;
  z.attention = attention.zeros_like();
  z.entity_in = zeros(entity_in);
  z.entity_out = zeros(entity_out);
  z.mix_token = zeros(mix_token);
  z.mix_entity = zeros(mix_entity);
  z.mix_bias = zeros(mix_bias);
  z.regen_token = zeros(regen_token);
  z.regen_token_bias = zeros(regen_token_bias);
  z.regen_entity = zeros(regen_entity);
  z.regen_entity_bias = zeros(regen_entity_bias);
  return z;
}

FusionParams FusionParams::init(const FusionDims& dims, std::uint64_t seed) {
  dims.validate();
  Rng rng(seed);
  const double d1 = static_cast<double>(dims.d1);
  const double d3 = static_cast<double>(dims.d3);
  const double d4 = static_cast<double>(dims.d4);
  const double concat = static_cast<double>(dims.d1 + dims.d2);
  FusionParams p;
  p.dims = dims;
  p.infuse_weight = nn::uniform_init(ix(dims.d2 + dims.d1), ix(dims.d3), concat, rng);
  p.infuse_bias = nn::uniform_init(1, ix(dims.d3), concat, rng);
  p.norm_weight = nn::uniform_init(ix(dims.d3), ix(dims.d3), d3, rng);
  p.norm_bias = nn::uniform_init(1, ix(dims.d3), d3, rng);
  for (std::size_t v = 0; v < dims.layers; ++v) {
    InjectorLayerParams l;
    l.attention = nn::MultiHeadAttention::init(dims.d1, dims.heads, rng);
    l.entity_in = nn::uniform_init(ix(dims.d3), ix(dims.d1), d3, rng);
    l.entity_out = nn::uniform_init(ix(dims.d1), ix(dims.d3), d1, rng);
    l.mix_token = nn::uniform_init(ix(dims.d1), ix(dims.d4), d1 + d3, rng);
    l.mix_entity = nn::uniform_init(ix(dims.d3), ix(dims.d4), d1 + d3, rng);
    l.mix_bias = nn::uniform_init(1, ix(dims.d4), d1 + d3, rng);
    l.regen_token = nn::uniform_init(ix(dims.d4), ix(dims.d1), d4, rng);
    l.regen_token_bias = nn::uniform_init(1, ix(dims.d1), d4, rng);
    l.regen_entity = nn::uniform_init(ix(dims.d4), ix(dims.d3), d4, rng);
    l.regen_entity_bias = nn::uniform_init(1, ix(dims.d3), d4, rng);
    p.layers.push_back(std::move(l));
  }
  return p;
}

FusionParams FusionParams::zeros_like() const {
  FusionParams z;
  z.dims = dims;
  z.infuse_weight = zeros(infuse_weight);
  z.infuse_bias = zeros(infuse_bias);
  z.norm_weight = zeros(norm_weight);
  z.norm_bias = zeros(norm_bias);
  for (const auto& l : layers) z.layers.push_back(l.zeros_like());
  z.lambda_mlm = lambda_mlm;
  z.lambda_cl = lambda_cl;
  z.tau = tau;
  z.aggregation = aggregation;
  return z;
}

void FusionParams::validate() const {
  dims.validate();
  const auto d1 = ix(dims.d1), d2 = ix(dims.d2), d3 = ix(dims.d3), d4 = ix(dims.d4);
  nn::check_shape(infuse_weight, d2 + d1, d3, "infusion weight");
  nn::check_shape(infuse_bias, 1, d3, "infusion bias");
  nn::check_shape(norm_weight, d3, d3, "infusion norm weight");
  nn::check_shape(norm_bias, 1, d3, "infusion norm bias");
  if (layers.size() != dims.layers) {
    throw std::invalid_argument("expected " + std::to_string(dims.layers) +
                                " injector layers, got " + std::to_string(layers.size()));
  }
  for (std::size_t v = 0; v < layers.size(); ++v) {
    const auto& l = layers[v];
    const std::string at = "injector layer " + std::to_string(v) + " ";
    l.attention.validate(dims.d1);
    nn::check_shape(l.entity_in, d3, d1, at + "entity lift");
    nn::check_shape(l.entity_out, d1, d3, at + "entity projection");
    nn::check_shape(l.mix_token, d1, d4, at + "token mixing weight");
    nn::check_shape(l.mix_entity, d3, d4, at + "entity mixing weight");
    nn::check_shape(l.mix_bias, 1, d4, at + "mixing bias");
    nn::check_shape(l.regen_token, d4, d1, at + "token regeneration weight");
    nn::check_shape(l.regen_token_bias, 1, d1, at + "token regeneration bias");
    nn::check_shape(l.regen_entity, d4, d3, at + "entity regeneration weight");
    nn::check_shape(l.regen_entity_bias, 1, d3, at + "entity regeneration bias");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("temperature must be positive");
  if (!std::isfinite(lambda_mlm) || !std::isfinite(lambda_cl)) {
    throw std::invalid_argument("loss weights must be finite");
  }
}

namespace {

template <typename Params, typename Out>
void collect(Params& p, Out& out) {
  out.emplace_back("infusion.weight", &p.infuse_weight);
  out.emplace_back("infusion.bias", &p.infuse_bias);
  out.emplace_back("infusion.norm_weight", &p.norm_weight);
  out.emplace_back("infusion.norm_bias", &p.norm_bias);
  for (std::size_t v = 0; v < p.layers.size(); ++v) {
    auto& l = p.layers[v];
    const std::string at = "injector." + std::to_string(v) + ".";
    out.emplace_back(at + "attention.wq", &l.attention.wq);
    out.emplace_back(at + "attention.wk", &l.attention.wk);
    out.emplace_back(at + "attention.wv", &l.attention.wv);
    out.emplace_back(at + "attention.wo", &l.attention.wo);
    out.emplace_back(at + "entity_in", &l.entity_in);
    out.emplace_back(at + "entity_out", &l.entity_out);
    out.emplace_back(at + "mix_token", &l.mix_token);
    out.emplace_back(at + "mix_entity", &l.mix_entity);
    out.emplace_back(at + "mix_bias", &l.mix_bias);
    out.emplace_back(at + "regen_token", &l.regen_token);
    out.emplace_back(at + "regen_token_bias", &l.regen_token_bias);
    out.emplace_back(at + "regen_entity", &l.regen_entity);
    out.emplace_back(at + "regen_entity_bias", &l.regen_entity_bias);
  }
}

}  // namespace

std::vector<std::pair<std::string, Matrix*>> named_tensors(FusionParams& p) {
  std::vector<std::pair<std::string, Matrix*>> out;
  collect(p, out);
  return out;
}

std::vector<std::pair<std::string, const Matrix*>> named_tensors(const FusionParams& p) {
  std::vector<std::pair<std::string, const Matrix*>> out;
  collect(p, out);
  return out;
}

Matrix entity_space_infusion(const Matrix& class_embedding, const Matrix& entity_repr,
                             const FusionParams& p, InfusionCache* cache) {
  if (class_embedding.cols() != ix(p.dims.d2)) {
    throw std::invalid_argument("class embedding has width " +
                                std::to_string(class_embedding.cols()) + ", expected d2=" +
                                std::to_string(p.dims.d2));
  }
  if (entity_repr.cols() != ix(p.dims.d1)) {
    throw std::invalid_argument("entity representation has width " +
                                std::to_string(entity_repr.cols()) + ", expected d1=" +
                                std::to_string(p.dims.d1));
  }
  if (class_embedding.rows() != entity_repr.rows()) {
    throw std::invalid_argument("class embeddings and entity representations differ in count");
  }
  Matrix input(entity_repr.rows(), class_embedding.cols() + entity_repr.cols());
  input << class_embedding, entity_repr;
  Matrix pre_gelu = nn::affine(input, p.infuse_weight, p.infuse_bias);
  Matrix hidden = nn::gelu(pre_gelu);
  Matrix pre_norm = nn::affine(hidden, p.norm_weight, p.norm_bias);
  Matrix out = nn::layer_norm(pre_norm);
  if (cache) {
    cache->input = std::move(input);
    cache->pre_gelu = std::move(pre_gelu);
    cache->hidden = std::move(hidden);
    cache->pre_norm = std::move(pre_norm);
  }
  return out;
}

RowVector entity_space_infusion(const RowVector& class_embedding, const RowVector& entity_repr,
                                const FusionParams& p) {
  return entity_space_infusion(Matrix(class_embedding), Matrix(entity_repr), p).row(0);
}

std::pair<Matrix, Matrix> entity_space_infusion_backward(const InfusionCache& cache,
                                                         const Matrix& dy, const FusionParams& p,
                                                         FusionParams& grads) {
  const Matrix d_pre_norm = nn::layer_norm_backward(cache.pre_norm, dy);
  grads.norm_weight += cache.hidden.transpose() * d_pre_norm;
  grads.norm_bias += d_pre_norm.colwise().sum();
  const Matrix d_pre_gelu = nn::gelu_backward(cache.pre_gelu, d_pre_norm * p.norm_weight.transpose());
  grads.infuse_weight += cache.input.transpose() * d_pre_gelu;
  grads.infuse_bias += d_pre_gelu.colwise().sum();
  const Matrix d_input = d_pre_gelu * p.infuse_weight.transpose();
  const auto d2 = ix(p.dims.d2);
  return {d_input.leftCols(d2), d_input.rightCols(d_input.cols() - d2)};
}

InjectorOutput injector_layer(const Matrix& entities, const Matrix& tokens,
                              const Alignment& alignment, const InjectorLayerParams& p,
                              InjectorLayerCache* cache) {
  const Eigen::Index n = tokens.rows();
  const Eigen::Index m = entities.rows();
  if (tokens.cols() != p.entity_in.cols()) {
    throw std::invalid_argument("token width " + std::to_string(tokens.cols()) +
                                " does not match layer width " +
                                std::to_string(p.entity_in.cols()));
  }
  if (entities.cols() != p.entity_in.rows()) {
    throw std::invalid_argument("entity width " + std::to_string(entities.cols()) +
                                " does not match layer width " +
                                std::to_string(p.entity_in.rows()));
  }
  check_alignment(alignment, m, n);

  Matrix joint(n + m, tokens.cols());
  joint << tokens, entities * p.entity_in;
  nn::MultiHeadAttention::Cache attn_cache;
  Matrix attended = joint + p.attention.forward(joint, cache ? &attn_cache : nullptr);

  InjectorOutput out;
  out.attended_tokens = attended.topRows(n);
  out.attended_entities = attended.bottomRows(m) * p.entity_out;

  Matrix mix_pre = nn::affine(out.attended_tokens, p.mix_token, p.mix_bias);
  for (Eigen::Index j = 0; j < m; ++j) {
    mix_pre.row(ix(*alignment[static_cast<std::size_t>(j)])) +=
        out.attended_entities.row(j) * p.mix_entity;
  }
  out.mixed = nn::gelu(mix_pre);

  Matrix token_pre = nn::affine(out.mixed, p.regen_token, p.regen_token_bias);
  Matrix entity_pre(m, p.regen_entity.cols());
  for (Eigen::Index j = 0; j < m; ++j) {
    entity_pre.row(j) = out.mixed.row(ix(*alignment[static_cast<std::size_t>(j)])) *
                            p.regen_entity +
                        p.regen_entity_bias;
  }
  out.tokens = nn::gelu(token_pre);
  out.entities = nn::gelu(entity_pre);

  if (cache) {
    cache->alignment = alignment;
    cache->entities_in = entities;
    cache->joint = std::move(joint);
    cache->attention = std::move(attn_cache);
    cache->attended = std::move(attended);
    cache->attended_entities = out.attended_entities;
    cache->mix_pre = std::move(mix_pre);
    cache->mixed = out.mixed;
    cache->token_pre = std::move(token_pre);
    cache->entity_pre = std::move(entity_pre);
  }
  return out;
}

std::pair<Matrix, Matrix> injector_layer_backward(const InjectorLayerCache& c,
                                                  const Matrix& d_tokens,
                                                  const Matrix& d_entities,
                                                  const InjectorLayerParams& p,
                                                  InjectorLayerParams& g) {
  const Eigen::Index m = c.entities_in.rows();
  const Eigen::Index n = c.joint.rows() - m;
  auto aligned = [&](Eigen::Index j) { return ix(*c.alignment[static_cast<std::size_t>(j)]); };

  const Matrix d_token_pre = nn::gelu_backward(c.token_pre, d_tokens);
  g.regen_token += c.mixed.transpose() * d_token_pre;
  g.regen_token_bias += d_token_pre.colwise().sum();
  Matrix d_mixed = d_token_pre * p.regen_token.transpose();

  const Matrix d_entity_pre = nn::gelu_backward(c.entity_pre, d_entities);
  for (Eigen::Index j = 0; j < m; ++j) {
    g.regen_entity += c.mixed.row(aligned(j)).transpose() * d_entity_pre.row(j);
    d_mixed.row(aligned(j)) += d_entity_pre.row(j) * p.regen_entity.transpose();
  }
  g.regen_entity_bias += d_entity_pre.colwise().sum();

  const Matrix d_mix_pre = nn::gelu_backward(c.mix_pre, d_mixed);
  const Matrix attended_tokens = c.attended.topRows(n);
  g.mix_token += attended_tokens.transpose() * d_mix_pre;
  g.mix_bias += d_mix_pre.colwise().sum();

  Matrix d_attended(n + m, c.attended.cols());
  d_attended.topRows(n) = d_mix_pre * p.mix_token.transpose();
  Matrix d_attended_entities(m, p.mix_entity.rows());
  for (Eigen::Index j = 0; j < m; ++j) {
    g.mix_entity += c.attended_entities.row(j).transpose() * d_mix_pre.row(aligned(j));
    d_attended_entities.row(j) = d_mix_pre.row(aligned(j)) * p.mix_entity.transpose();
  }
  g.entity_out += c.attended.bottomRows(m).transpose() * d_attended_entities;
  d_attended.bottomRows(m) = d_attended_entities * p.entity_out.transpose();

  const Matrix d_joint = d_attended + p.attention.backward(c.attention, d_attended, g.attention);
  const Matrix d_lifted = d_joint.bottomRows(m);
  g.entity_in += c.entities_in.transpose() * d_lifted;
  return {d_lifted * p.entity_in.transpose(), d_joint.topRows(n)};
}

std::pair<Matrix, Matrix> knowledge_injector(const Matrix& entities, const Matrix& tokens,
                                             const Alignment& alignment, const FusionParams& p,
                                             InjectorStackCache* cache) {
  if (cache) cache->layers.assign(p.layers.size(), {});
  auto layer_cache = [&](std::size_t v) { return cache ? &cache->layers[v] : nullptr; };

  if (p.aggregation == Aggregation::Sequential) {
    Matrix e = entities;
    Matrix t = tokens;
    for (std::size_t v = 0; v < p.layers.size(); ++v) {
      InjectorOutput o = injector_layer(e, t, alignment, p.layers[v], layer_cache(v));
      e = std::move(o.entities);
      t = std::move(o.tokens);
    }
    return {t, e};
  }

  Matrix t_sum = Matrix::Zero(tokens.rows(), ix(p.dims.d1));
  Matrix e_sum = Matrix::Zero(entities.rows(), ix(p.dims.d3));
  for (std::size_t v = 0; v < p.layers.size(); ++v) {
    InjectorOutput o = injector_layer(entities, tokens, alignment, p.layers[v], layer_cache(v));
    t_sum += o.tokens;
    e_sum += o.entities;
  }
  return {t_sum, e_sum};
}

std::pair<Matrix, Matrix> knowledge_injector_backward(const InjectorStackCache& cache,
                                                      const Matrix& d_tokens,
                                                      const Matrix& d_entities,
                                                      const FusionParams& p,
                                                      FusionParams& grads) {
  if (p.aggregation == Aggregation::Sequential) {
    Matrix de = d_entities;
    Matrix dt = d_tokens;
    for (std::size_t v = p.layers.size(); v-- > 0;) {
      auto [next_de, next_dt] =
          injector_layer_backward(cache.layers[v], dt, de, p.layers[v], grads.layers[v]);
      de = std::move(next_de);
      dt = std::move(next_dt);
    }
    return {de, dt};
  }
  Matrix de_sum, dt_sum;
  for (std::size_t v = 0; v < p.layers.size(); ++v) {
    auto [de, dt] =
        injector_layer_backward(cache.layers[v], d_tokens, d_entities, p.layers[v], grads.layers[v]);
    if (v == 0) {
      de_sum = std::move(de);
      dt_sum = std::move(dt);
    } else {
      de_sum += de;
      dt_sum += dt;
    }
  }
  return {de_sum, dt_sum};
}

RowVector entity_to_token_space(const RowVector& entity, const FusionParams& p) {
  if (p.layers.empty()) throw std::invalid_argument("no injector layers");
  const Matrix& lift = p.layers.back().entity_in;
  if (entity.cols() != lift.rows()) {
    throw std::invalid_argument("entity vector has width " + std::to_string(entity.cols()) +
                                ", expected d3=" + std::to_string(lift.rows()));
  }
  return entity * lift;
}

double cosine(const RowVector& a, const RowVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("cosine: width mismatch");
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("cosine of a zero-norm vector");
  return a.dot(b) / (na * nb);
}

namespace {

// d cos(a, b) / d a
RowVector cosine_grad(const RowVector& a, const RowVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  const double c = a.dot(b) / (na * nb);
  return b / (na * nb) - c * a / (na * na);
}

}  // namespace

double info_nce(std::span<const ContrastiveItem> items, double tau, ContrastiveGrads* grads) {
  if (!(tau > 0.0)) throw std::invalid_argument("info_nce: temperature must be positive");
  if (grads) {
    grads->anchor.clear();
    grads->positive.clear();
    grads->negatives.clear();
  }
  double loss = 0.0;
  for (const ContrastiveItem& item : items) {
    const std::size_t k = item.negatives.size();
    if (k == 0) throw std::invalid_argument("info_nce: needs at least one negative");
    Eigen::VectorXd logits(ix(k + 1));
    logits(0) = cosine(item.anchor, item.positive) / tau;
    for (std::size_t l = 0; l < k; ++l) logits(ix(l + 1)) = cosine(item.anchor, item.negatives[l]) / tau;
    const double lse = nn::log_sum_exp(logits);
    loss += lse - logits(0);
    if (!grads) continue;

    // d loss / d logit_i = softmax_i - [i == 0]
    const Eigen::VectorXd w = (logits.array() - lse).exp();
    RowVector d_anchor = (w(0) - 1.0) / tau * cosine_grad(item.anchor, item.positive);
    grads->positive.push_back((w(0) - 1.0) / tau * cosine_grad(item.positive, item.anchor));
    std::vector<RowVector> d_negs;
    for (std::size_t l = 0; l < k; ++l) {
      const double coeff = w(ix(l + 1)) / tau;
      d_anchor += coeff * cosine_grad(item.anchor, item.negatives[l]);
      d_negs.push_back(coeff * cosine_grad(item.negatives[l], item.anchor));
    }
    grads->anchor.push_back(std::move(d_anchor));
    grads->negatives.push_back(std::move(d_negs));
  }
  return loss;
}

double info_nce(const RowVector& anchor, const RowVector& positive,
                std::span<const RowVector> negatives, double tau) {
  ContrastiveItem item{anchor, positive, {negatives.begin(), negatives.end()}};
  return info_nce(std::span<const ContrastiveItem>(&item, 1), tau);
}

double total_loss(double l_mlm, double l_cl, double lambda_mlm, double lambda_cl) {
  return lambda_mlm * l_mlm + lambda_cl * l_cl;
}

}  // namespace kgaug::fusion
