#include "quatkmp/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace quatkmp::cli {

namespace {

using nlohmann::json;

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream stream(line);
  std::string cell;
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  return cells;
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  *header = split_line(line);
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header->size()) {
      throw IoError(path + ":" + std::to_string(line_no) +
                    ": expected " + std::to_string(header->size()) +
                    " columns, got " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const std::string& cell : cells) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError(path + ":" + std::to_string(line_no) +
                      ": cannot parse number '" + cell + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd json_to_vector(const json& arr, const std::string& what) {
  if (!arr.is_array()) throw IoError(what + ": expected an array");
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[i] = arr[i].get<double>();
  return v;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    rows.push_back(vector_to_json(m.row(i).transpose()));
  }
  return rows;
}

Eigen::MatrixXd json_to_matrix(const json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) {
    throw IoError(what + ": expected a non-empty array of rows");
  }
  const Eigen::Index n_cols = rows[0].size();
  Eigen::MatrixXd m(rows.size(), n_cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    m.row(i) = json_to_vector(rows[i], what).transpose();
  }
  return m;
}

json quat_to_json(const quat::UnitQuaternion& q) {
  return json::array({q.w(), q.x(), q.y(), q.z()});
}

quat::UnitQuaternion json_to_quat(const json& arr, const std::string& what) {
  const Eigen::VectorXd v = json_to_vector(arr, what);
  if (v.size() != 4) throw IoError(what + ": quaternion needs 4 entries");
  return quat::UnitQuaternion(v[0], v.tail<3>());
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open file for writing");
  return out;
}

quat::UnitQuaternion quat_from_row(const std::vector<double>& row, int offset,
                                   const std::string& path) {
  const Eigen::Vector4d q(row[offset], row[offset + 1], row[offset + 2],
                          row[offset + 3]);
  if (std::abs(q.norm() - 1.0) > 1e-6) {
    throw IoError(path + ": quaternion row is not unit norm (|q| = " +
                  std::to_string(q.norm()) + ")");
  }
  return quat::UnitQuaternion(q[0], q.tail<3>());
}

}  // namespace

void write_time_demos(const std::string& path,
                      const std::vector<quat::QuatDemo>& demos) {
  std::ofstream out = open_out(path);
  out << "demo,t,qw,qx,qy,qz\n";
  for (std::size_t m = 0; m < demos.size(); ++m) {
    for (std::size_t n = 0; n < demos[m].size(); ++n) {
      const auto& q = demos[m].quats[n];
      out << m << ',' << fmt(demos[m].times[n]) << ',' << fmt(q.w()) << ','
          << fmt(q.x()) << ',' << fmt(q.y()) << ',' << fmt(q.z()) << '\n';
    }
  }
}

std::vector<quat::QuatDemo> read_time_demos(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header != std::vector<std::string>{"demo", "t", "qw", "qx", "qy", "qz"}) {
    throw IoError(path + ": unexpected header for a time demo file");
  }
  std::vector<quat::QuatDemo> demos;
  for (const auto& row : rows) {
    const std::size_t index = static_cast<std::size_t>(row[0]);
    if (index >= demos.size()) demos.resize(index + 1);
    demos[index].times.push_back(row[1]);
    demos[index].quats.push_back(quat_from_row(row, 2, path));
  }
  return demos;
}

void write_pose_demos(const std::string& path,
                      const std::vector<highdim::PoseDemo>& demos) {
  std::ofstream out = open_out(path);
  if (demos.empty() || demos[0].size() == 0) {
    throw IoError(path + ": nothing to write");
  }
  const int input_dim = static_cast<int>(demos[0].inputs[0].size());
  out << "demo";
  for (int d = 0; d < input_dim; ++d) out << ",s" << d;
  out << ",px,py,pz,qw,qx,qy,qz\n";
  for (std::size_t m = 0; m < demos.size(); ++m) {
    for (std::size_t n = 0; n < demos[m].size(); ++n) {
      out << m;
      for (int d = 0; d < input_dim; ++d) {
        out << ',' << fmt(demos[m].inputs[n][d]);
      }
      const auto& p = demos[m].positions[n];
      const auto& q = demos[m].quats[n];
      out << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z()) << ','
          << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ','
          << fmt(q.z()) << '\n';
    }
  }
}

std::vector<highdim::PoseDemo> read_pose_demos(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header.size() < 9 || header[0] != "demo" || header[1] != "s0") {
    throw IoError(path + ": unexpected header for a pose demo file");
  }
  const int input_dim = static_cast<int>(header.size()) - 8;
  std::vector<highdim::PoseDemo> demos;
  for (const auto& row : rows) {
    const std::size_t index = static_cast<std::size_t>(row[0]);
    if (index >= demos.size()) demos.resize(index + 1);
    Eigen::VectorXd s(input_dim);
    for (int d = 0; d < input_dim; ++d) s[d] = row[1 + d];
    demos[index].inputs.push_back(s);
    const int base = 1 + input_dim;
    demos[index].positions.push_back(
        Eigen::Vector3d(row[base], row[base + 1], row[base + 2]));
    demos[index].quats.push_back(quat_from_row(row, base + 3, path));
  }
  return demos;
}

void write_time_trajectory(const std::string& path,
                           const TimeTrajectoryFile& traj, bool as_json) {
  if (as_json) {
    json doc;
    doc["columns"] = {"t", "qw", "qx", "qy", "qz", "wx", "wy", "wz",
                      "zx", "zy", "zz"};
    json rows = json::array();
    for (std::size_t n = 0; n < traj.times.size(); ++n) {
      const auto& q = traj.quats[n];
      const auto& w = traj.omegas[n];
      const auto& z = traj.zetas[n];
      rows.push_back({traj.times[n], q.w(), q.x(), q.y(), q.z(), w.x(), w.y(),
                      w.z(), z.x(), z.y(), z.z()});
    }
    doc["rows"] = rows;
    write_text_file(path, doc.dump(2) + "\n");
    return;
  }
  std::ofstream out = open_out(path);
  out << "t,qw,qx,qy,qz,wx,wy,wz,zx,zy,zz\n";
  for (std::size_t n = 0; n < traj.times.size(); ++n) {
    const auto& q = traj.quats[n];
    const auto& w = traj.omegas[n];
    const auto& z = traj.zetas[n];
    out << fmt(traj.times[n]) << ',' << fmt(q.w()) << ',' << fmt(q.x()) << ','
        << fmt(q.y()) << ',' << fmt(q.z()) << ',' << fmt(w.x()) << ','
        << fmt(w.y()) << ',' << fmt(w.z()) << ',' << fmt(z.x()) << ','
        << fmt(z.y()) << ',' << fmt(z.z()) << '\n';
  }
}

TimeTrajectoryFile read_time_trajectory(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header.size() != 11 || header[0] != "t" || header[1] != "qw") {
    throw IoError(path + ": unexpected header for a trajectory file");
  }
  TimeTrajectoryFile traj;
  for (const auto& row : rows) {
    traj.times.push_back(row[0]);
    traj.quats.push_back(quat_from_row(row, 1, path));
    traj.omegas.push_back(quat::AngularVelocity(row[5], row[6], row[7]));
    traj.zetas.push_back(quat::Tangent3(row[8], row[9], row[10]));
  }
  return traj;
}

void write_pose_trajectory(const std::string& path,
                           const PoseTrajectoryFile& traj, bool as_json) {
  const int input_dim =
      traj.inputs.empty() ? 0 : static_cast<int>(traj.inputs[0].size());
  if (as_json) {
    json doc;
    json columns = json::array();
    for (int d = 0; d < input_dim; ++d) columns.push_back("s" + std::to_string(d));
    for (const char* c : {"px", "py", "pz", "qw", "qx", "qy", "qz"}) {
      columns.push_back(c);
    }
    doc["columns"] = columns;
    json rows = json::array();
    for (std::size_t n = 0; n < traj.inputs.size(); ++n) {
      json row = json::array();
      for (int d = 0; d < input_dim; ++d) row.push_back(traj.inputs[n][d]);
      for (double v : {traj.positions[n].x(), traj.positions[n].y(),
                       traj.positions[n].z(), traj.quats[n].w(),
                       traj.quats[n].x(), traj.quats[n].y(), traj.quats[n].z()}) {
        row.push_back(v);
      }
      rows.push_back(row);
    }
    doc["rows"] = rows;
    write_text_file(path, doc.dump(2) + "\n");
    return;
  }
  std::ofstream out = open_out(path);
  for (int d = 0; d < input_dim; ++d) out << (d ? ",s" : "s") << d;
  out << ",px,py,pz,qw,qx,qy,qz\n";
  for (std::size_t n = 0; n < traj.inputs.size(); ++n) {
    for (int d = 0; d < input_dim; ++d) {
      out << (d ? "," : "") << fmt(traj.inputs[n][d]);
    }
    const auto& p = traj.positions[n];
    const auto& q = traj.quats[n];
    out << ',' << fmt(p.x()) << ',' << fmt(p.y()) << ',' << fmt(p.z()) << ','
        << fmt(q.w()) << ',' << fmt(q.x()) << ',' << fmt(q.y()) << ','
        << fmt(q.z()) << '\n';
  }
}

PoseTrajectoryFile read_pose_trajectory(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header.size() < 8 || header[0] != "s0") {
    throw IoError(path + ": unexpected header for a pose trajectory file");
  }
  const int input_dim = static_cast<int>(header.size()) - 7;
  PoseTrajectoryFile traj;
  for (const auto& row : rows) {
    Eigen::VectorXd s(input_dim);
    for (int d = 0; d < input_dim; ++d) s[d] = row[d];
    traj.inputs.push_back(s);
    traj.positions.push_back(
        Eigen::Vector3d(row[input_dim], row[input_dim + 1], row[input_dim + 2]));
    traj.quats.push_back(quat_from_row(row, input_dim + 3, path));
  }
  return traj;
}

std::vector<Eigen::VectorXd> read_inputs_csv(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, &header);
  if (header.empty() || header[0] != "s0") {
    throw IoError(path + ": expected an inputs file with header s0,s1,...");
  }
  std::vector<Eigen::VectorXd> inputs;
  for (const auto& row : rows) {
    Eigen::VectorXd s(row.size());
    for (std::size_t d = 0; d < row.size(); ++d) s[d] = row[d];
    inputs.push_back(s);
  }
  return inputs;
}

namespace {

json kernel_to_json(const kmp::KernelSpec& spec) {
  json node;
  node["type"] =
      spec.kind == kmp::KernelSpec::Kind::gaussian ? "gaussian" : "periodic";
  node["ell"] = spec.ell;
  node["period"] = spec.period;
  node["delta"] = spec.delta;
  return node;
}

kmp::KernelSpec kernel_from_json(const json& node, const std::string& what) {
  const std::string type = node.value("type", std::string("gaussian"));
  if (type == "gaussian") {
    return kmp::KernelSpec::gaussian_kernel(node["ell"].get<double>(),
                                            node["delta"].get<double>());
  }
  if (type == "periodic") {
    return kmp::KernelSpec::periodic_kernel(node["ell"].get<double>(),
                                            node["period"].get<double>(),
                                            node["delta"].get<double>());
  }
  throw IoError(what + ": unknown kernel type '" + type + "'");
}

json machine_to_json(const kmp::Model& machine) {
  json node;
  node["kernel"] = kernel_to_json(machine.kernel);
  switch (machine.layout.kind) {
    case kmp::BlockLayout::Kind::time_deriv:
      node["layout"] = "time_deriv";
      break;
    case kmp::BlockLayout::Kind::time_accel:
      node["layout"] = "time_accel";
      break;
    case kmp::BlockLayout::Kind::time_jerk:
      node["layout"] = "time_jerk";
      break;
    case kmp::BlockLayout::Kind::plain:
      node["layout"] = "plain";
      break;
  }
  node["out_dim"] = machine.layout.out_dim;
  node["lambda"] = machine.lambda;
  node["lambda_a"] = machine.lambda_accel;
  node["dual_coeffs"] = vector_to_json(machine.dual_coeffs);
  json inputs = json::array();
  for (const auto& input : machine.train_inputs) {
    inputs.push_back(vector_to_json(input));
  }
  node["train_inputs"] = inputs;
  return node;
}

kmp::Model machine_from_json(const json& node, const std::string& what) {
  kmp::Model machine;
  machine.kernel = kernel_from_json(node["kernel"], what);
  const std::string layout = node["layout"].get<std::string>();
  if (layout == "time_deriv") {
    machine.layout = kmp::BlockLayout::time_deriv();
  } else if (layout == "time_accel") {
    machine.layout = kmp::BlockLayout::time_accel();
  } else if (layout == "time_jerk") {
    machine.layout = kmp::BlockLayout::time_jerk();
  } else if (layout == "plain") {
    machine.layout = kmp::BlockLayout::plain(node["out_dim"].get<int>());
  } else {
    throw IoError(what + ": unknown layout '" + layout + "'");
  }
  machine.lambda = node["lambda"].get<double>();
  machine.lambda_accel = node["lambda_a"].get<double>();
  machine.dual_coeffs = json_to_vector(node["dual_coeffs"], what);
  for (const auto& input : node["train_inputs"]) {
    machine.train_inputs.push_back(json_to_vector(input, what));
  }
  return machine;
}

json mixture_to_json(const gmm::GaussianMixture& mixture) {
  json node;
  node["input_dim"] = mixture.input_dim;
  node["output_dim"] = mixture.output_dim;
  json components = json::array();
  for (const auto& comp : mixture.components) {
    json c;
    c["prior"] = comp.prior;
    c["mean"] = vector_to_json(comp.mean);
    c["cov"] = matrix_to_json(comp.cov);
    components.push_back(c);
  }
  node["components"] = components;
  return node;
}

gmm::GaussianMixture mixture_from_json(const json& node,
                                       const std::string& what) {
  gmm::GaussianMixture mixture;
  mixture.input_dim = node["input_dim"].get<int>();
  mixture.output_dim = node["output_dim"].get<int>();
  for (const auto& c : node["components"]) {
    gmm::GaussianComponent comp;
    comp.prior = c["prior"].get<double>();
    comp.mean = json_to_vector(c["mean"], what);
    comp.cov = json_to_matrix(c["cov"], what);
    mixture.components.push_back(std::move(comp));
  }
  return mixture;
}

json reference_to_json(const std::vector<gmm::RefPoint>& reference) {
  json node;
  json inputs = json::array();
  json means = json::array();
  json covs = json::array();
  for (const auto& point : reference) {
    inputs.push_back(vector_to_json(point.input));
    means.push_back(vector_to_json(point.mean));
    covs.push_back(matrix_to_json(point.cov));
  }
  node["inputs"] = inputs;
  node["means"] = means;
  node["covs"] = covs;
  return node;
}

std::vector<gmm::RefPoint> reference_from_json(const json& node,
                                               const std::string& what) {
  std::vector<gmm::RefPoint> reference;
  const auto& inputs = node["inputs"];
  const auto& means = node["means"];
  const auto& covs = node["covs"];
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    gmm::RefPoint point;
    point.input = json_to_vector(inputs[i], what);
    point.mean = json_to_vector(means[i], what);
    point.cov = json_to_matrix(covs[i], what);
    reference.push_back(std::move(point));
  }
  return reference;
}

}  // namespace

void save_model(const std::string& path, const StoredModel& model) {
  json doc;
  doc["format"] = "quatkmp-model-v1";
  doc["mode"] = mode_name(model.mode);
  if (model.mode == Mode::highdim) {
    doc["q_a"] = quat_to_json(model.pose_model.base);
    doc["machine"] = machine_to_json(model.pose_model.machine);
    doc["gmm"] = mixture_to_json(model.pose_model.mixture);
    doc["input_shift"] = vector_to_json(model.pose_model.input_shift);
    doc["input_scale"] = vector_to_json(model.pose_model.input_scale);
  } else {
    doc["q_a"] = quat_to_json(model.time_model.base);
    doc["delta_t"] = model.time_model.delta_t;
    doc["penalty"] = model.time_model.penalty == kmp::PenaltyOrder::jerk
                         ? "jerk"
                         : "acceleration";
    doc["machine"] = machine_to_json(model.time_model.machine);
    doc["gmm"] = mixture_to_json(model.time_model.mixture);
  }
  doc["reference"] = reference_to_json(model.reference);
  write_text_file(path, doc.dump(2) + "\n");
}

StoredModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open model file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& err) {
    throw IoError(path + ": " + err.what());
  }
  if (doc.value("format", std::string()) != "quatkmp-model-v1") {
    throw IoError(path + ": not a quatkmp model file");
  }
  StoredModel model;
  const std::string mode = doc["mode"].get<std::string>();
  if (mode == "highdim") {
    model.mode = Mode::highdim;
    model.pose_model.base = json_to_quat(doc["q_a"], path);
    model.pose_model.machine = machine_from_json(doc["machine"], path);
    model.pose_model.mixture = mixture_from_json(doc["gmm"], path);
    model.pose_model.input_shift = json_to_vector(doc["input_shift"], path);
    model.pose_model.input_scale = json_to_vector(doc["input_scale"], path);
  } else {
    model.mode = mode == "rhythmic"
                     ? Mode::rhythmic
                     : (mode == "time_accel" ? Mode::time_accel : Mode::time);
    model.time_model.base = json_to_quat(doc["q_a"], path);
    model.time_model.delta_t = doc["delta_t"].get<double>();
    model.time_model.penalty = doc.value("penalty", std::string()) == "jerk"
                                   ? kmp::PenaltyOrder::jerk
                                   : kmp::PenaltyOrder::acceleration;
    model.time_model.machine = machine_from_json(doc["machine"], path);
    model.time_model.mixture = mixture_from_json(doc["gmm"], path);
  }
  model.reference = reference_from_json(doc["reference"], path);
  return model;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out = open_out(path);
  out << text;
  if (!out) throw IoError(path + ": write failed");
}

}  // namespace quatkmp::cli
