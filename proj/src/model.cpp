// Copyright 2026 The adgb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "adgb/model.hpp"

#include <numeric>
#include <string>

#include "adgb/rng.hpp"

namespace adgb {

ModelParams ModelParams::make(const ModelConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  ModelParams p;
  p.cfg = cfg;
  p.enc_v = Mlp::make(cfg.enc_v_widths(), rng);
  p.enc_e = Mlp::make(cfg.enc_e_widths(), rng);
  p.prop_e = Mlp::make(cfg.prop_e_widths(), rng);
  p.prop_v = Mlp::make(cfg.prop_v_widths(), rng);
  p.dec = Mlp::make(cfg.dec_widths(), rng);
  p.validate();
  return p;
}

void ModelParams::validate() const {
  if (cfg.rounds < 1) throw ConfigError("ModelConfig: rounds must be >= 1");
  auto expect = [](const Mlp& m, const std::vector<int>& widths, const char* name) {
    if (m.widths != widths) throw ShapeError(std::string("ModelParams: ") + name + " widths inconsistent");
  };
  expect(enc_v, cfg.enc_v_widths(), "vertex encoder");
  expect(enc_e, cfg.enc_e_widths(), "edge encoder");
  expect(prop_e, cfg.prop_e_widths(), "edge propagator");
  expect(prop_v, cfg.prop_v_widths(), "vertex propagator");
  expect(dec, cfg.dec_widths(), "vertex decoder");
  if (dec.out_width() != kDim) throw ShapeError("ModelParams: decoder must output D");
}

int ModelParams::param_count() const {
  return enc_v.param_count() + enc_e.param_count() + prop_e.param_count() + prop_v.param_count() +
         dec.param_count();
}

std::vector<Matrix*> ModelParams::tensors() {
  std::vector<Matrix*> out;
  for (Mlp* m : {&enc_v, &enc_e, &prop_e, &prop_v, &dec})
    for (int l = 0; l < m->layer_count(); ++l) {
      out.push_back(&m->weights[l]);
      out.push_back(&m->biases[l]);
    }
  return out;
}

std::vector<const Matrix*> ModelParams::tensors() const {
  std::vector<const Matrix*> out;
  for (const Mlp* m : {&enc_v, &enc_e, &prop_e, &prop_v, &dec})
    for (int l = 0; l < m->layer_count(); ++l) {
      out.push_back(&m->weights[l]);
      out.push_back(&m->biases[l]);
    }
  return out;
}

namespace {

Matrix gather_plain(const Matrix& a, const std::vector<int>& rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = a.row(rows[i]);
  return out;
}

Matrix hconcat_plain(const std::vector<const Matrix*>& parts) {
  Eigen::Index rows = parts.front()->rows(), cols = 0;
  for (const Matrix* p : parts) cols += p->cols();
  Matrix out(rows, cols);
  Eigen::Index at = 0;
  for (const Matrix* p : parts) {
    out.middleCols(at, p->cols()) = *p;
    at += p->cols();
  }
  return out;
}

}  // namespace

Prediction predict_step(const ModelParams& params, const DynGraph& g) {
  params.validate();
  const ModelConfig& cfg = params.cfg;
  if (g.vertex_feats.cols() != kVertexFeatWidth || g.edge_feats.cols() != kEdgeFeatWidth)
    throw ShapeError("predict_step: graph feature widths do not match the architecture");
  const int n_all = g.n_vertices();

  Matrix h_v = mlp_forward(params.enc_v, g.vertex_feats);
  Matrix recv_f = gather_plain(g.vertex_feats, g.receivers);
  Matrix send_f = gather_plain(g.vertex_feats, g.senders);
  Matrix h_e = mlp_forward(params.enc_e, hconcat_plain({&recv_f, &send_f, &g.edge_feats}));

  for (int l = 0; l < cfg.rounds; ++l) {
    Matrix recv_h = gather_plain(h_v, g.receivers);
    Matrix send_h = gather_plain(h_v, g.senders);
    Matrix pe_in = cfg.edge_state_in_prop ? hconcat_plain({&recv_h, &send_h, &h_e})
                                          : hconcat_plain({&recv_h, &send_h});
    h_e = mlp_forward(params.prop_e, pe_in);
    Matrix agg = sorted_scatter_add(h_e, g.receivers, n_all);
    Matrix delta = mlp_forward(params.prop_v, hconcat_plain({&h_v, &agg}));
    h_v = cfg.residual_vertex ? Matrix(h_v + delta) : delta;
  }

  Matrix out = mlp_forward(params.dec, h_v);
  Prediction pred;
  pred.displacement = out.topRows(g.n_obj) * (1.0 / cfg.graph.pos_scale);
  pred.next_pos = g.obj_pos + pred.displacement;
  require_finite(pred.next_pos, "predict_step output");
  return pred;
}

std::vector<Matrix> rollout(const ModelParams& params, const std::vector<ParticleState>& window,
                            const std::vector<Matrix>& eef_future, const PhysicalProperty& prop,
                            int steps) {
  if (steps < 0) throw ConfigError("rollout: steps must be >= 0");
  if (static_cast<int>(eef_future.size()) < steps)
    throw ConfigError("rollout: need at least " + std::to_string(steps) +
                      " future end-effector positions");
  std::vector<ParticleState> win = window;
  std::vector<Matrix> out;
  out.reserve(steps);
  for (int k = 0; k < steps; ++k) {
    DynGraph g = assemble_graph(win, eef_future[k], prop, params.cfg.graph);
    Prediction pred = predict_step(params, g);
    ParticleState next;
    next.object = pred.next_pos;
    next.eef = eef_future[k];
    next.step = win.back().step + 1;
    win.erase(win.begin());
    win.push_back(std::move(next));
    out.push_back(pred.next_pos);
  }
  return out;
}

ModelVars model_to_tape(Tape& tape, const ModelParams& params) {
  return {mlp_to_tape(tape, params.enc_v), mlp_to_tape(tape, params.enc_e),
          mlp_to_tape(tape, params.prop_e), mlp_to_tape(tape, params.prop_v),
          mlp_to_tape(tape, params.dec)};
}

ModelVars model_to_tape_ref(Tape& tape, const ModelParams& params) {
  return {mlp_to_tape_ref(tape, params.enc_v), mlp_to_tape_ref(tape, params.enc_e),
          mlp_to_tape_ref(tape, params.prop_e), mlp_to_tape_ref(tape, params.prop_v),
          mlp_to_tape_ref(tape, params.dec)};
}

std::vector<const Matrix*> model_grads(Tape& tape, const ModelVars& vars) {
  std::vector<const Matrix*> out;
  for (const MlpVars* m : {&vars.enc_v, &vars.enc_e, &vars.prop_e, &vars.prop_v, &vars.dec})
    for (std::size_t l = 0; l < m->weights.size(); ++l) {
      out.push_back(&tape.grad(m->weights[l]));
      out.push_back(&tape.grad(m->biases[l]));
    }
  return out;
}

Var model_step_tape(Tape& tape, const ModelVars& vars, const ModelConfig& cfg,
                    const std::vector<Var>& obj_window, const std::vector<Matrix>& eef_window,
                    const Matrix& eef_next, const PhysicalProperty& prop) {
  if (static_cast<int>(obj_window.size()) != kHistory + 1 ||
      static_cast<int>(eef_window.size()) != kHistory + 1)
    throw ShapeError("model_step_tape: window must hold kHistory+1 states");
  const Matrix& obj_now = tape.value(obj_window.back());
  const int n_obj = static_cast<int>(obj_now.rows());
  const int n_eef = static_cast<int>(eef_window.back().rows());
  const double s = cfg.graph.pos_scale;

  // Vertex features: object displacement blocks from tape vars, then the
  // constant object/end-effector blocks (same helpers as assemble_graph).
  std::vector<Var> obj_parts;
  for (int j = 0; j < kHistory; ++j)
    obj_parts.push_back(tape.scale(tape.sub(obj_window[j + 1], obj_window[j]), s));
  RowVector obj_block = vertex_static_block(true, prop, cfg.graph);
  Matrix obj_static(n_obj, obj_block.size());
  for (int i = 0; i < n_obj; ++i) obj_static.row(i) = obj_block;
  obj_parts.push_back(tape.leaf(std::move(obj_static)));
  Var obj_feats = tape.hconcat(obj_parts);

  Matrix eef_feats(n_eef, kVertexFeatWidth);
  RowVector eef_block = vertex_static_block(false, prop, cfg.graph);
  for (int j = 0; j < kHistory; ++j) {
    const Matrix& eef_new = (j + 2 <= kHistory) ? eef_window[j + 2] : eef_next;
    eef_feats.block(0, j * kDim, n_eef, kDim) = (eef_new - eef_window[j + 1]) * s;
  }
  for (int i = 0; i < n_eef; ++i) eef_feats.row(i).tail(eef_block.size()) = eef_block;
  Var vertex_feats = tape.vconcat({obj_feats, tape.leaf(std::move(eef_feats))});

  // Edges from current (possibly predicted) positions; structure is data
  // dependent and carries no gradient.
  std::vector<int> receivers, senders;
  build_graph_edges(obj_now, eef_window.back(), cfg.graph, receivers, senders);
  const int m = static_cast<int>(receivers.size());

  Var all_pos = tape.vconcat({obj_window.back(), tape.leaf(eef_window.back())});
  Var rel = tape.scale(tape.sub(tape.gather_rows(all_pos, senders), tape.gather_rows(all_pos, receivers)), s);
  Matrix edge_attr(m, kEdgeAttrWidth);
  for (int e = 0; e < m; ++e) {
    bool robot_edge = senders[e] >= n_obj;
    edge_attr(e, 0) = robot_edge ? 0.0 : 1.0;
    edge_attr(e, 1) = robot_edge ? 1.0 : 0.0;
  }
  Var edge_feats = tape.hconcat({rel, tape.leaf(std::move(edge_attr))});

  Var h_v = mlp_forward(tape, vars.enc_v, vertex_feats);
  Var recv_f = tape.gather_rows(vertex_feats, receivers);
  Var send_f = tape.gather_rows(vertex_feats, senders);
  Var h_e = mlp_forward(tape, vars.enc_e, tape.hconcat({recv_f, send_f, edge_feats}));

  const int n_all = n_obj + n_eef;
  for (int l = 0; l < cfg.rounds; ++l) {
    Var recv_h = tape.gather_rows(h_v, receivers);
    Var send_h = tape.gather_rows(h_v, senders);
    Var pe_in = cfg.edge_state_in_prop ? tape.hconcat({recv_h, send_h, h_e})
                                       : tape.hconcat({recv_h, send_h});
    h_e = mlp_forward(tape, vars.prop_e, pe_in);
    Var agg = tape.scatter_add_rows(h_e, receivers, n_all);
    Var delta = mlp_forward(tape, vars.prop_v, tape.hconcat({h_v, agg}));
    h_v = cfg.residual_vertex ? tape.add(h_v, delta) : delta;
  }

  Var out = mlp_forward(tape, vars.dec, h_v);
  std::vector<int> obj_rows(n_obj);
  std::iota(obj_rows.begin(), obj_rows.end(), 0);
  Var disp = tape.scale(tape.gather_rows(out, obj_rows), 1.0 / s);
  return tape.add(obj_window.back(), disp);
}

}  // namespace adgb
