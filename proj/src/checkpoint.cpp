// Copyright 2026 The omega-net Authors
// SPDX-License-Identifier: Apache-2.0
#include "omega/checkpoint.hpp"

#include "omega/config.hpp"

namespace omega {

namespace {

Tensor<float> text_tensor(const std::string& s) {
  std::vector<float> bytes;
  for (unsigned char c : s) bytes.push_back(static_cast<float>(c));
  const Shape shape{static_cast<std::int64_t>(bytes.size())};
  return Tensor<float>(shape, std::move(bytes));
}

std::string tensor_text(const Tensor<float>& t) {
  std::string s;
  for (float v : t.data()) {
    if (!(v >= 0 && v <= 255) || v != static_cast<float>(static_cast<int>(v))) {
      throw CheckpointError("config header holds a non-byte value");
    }
    s.push_back(static_cast<char>(static_cast<int>(v)));
  }
  return s;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const OmegaNet<float>& net,
                     const train::AdamState<float>* optimizer) {
  data::TensorList out;
  out.push_back({kConfigTensorName, text_tensor(to_json(net.config()).dump())});
  for (const auto& p : net.parameters()) out.push_back({p.name, p.value});
  if (optimizer) {
    out.push_back({"optim.step", Tensor<float>::scalar(static_cast<float>(optimizer->step))});
    for (std::size_t i = 0; i < net.parameters().size(); ++i) {
      out.push_back({"optim.m." + net.parameters()[i].name, optimizer->m[i]});
      out.push_back({"optim.v." + net.parameters()[i].name, optimizer->v[i]});
    }
  }
  data::write_otf(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected,
                           const train::AdamConfig& adam) {
  data::TensorList tensors;
  try {
    tensors = data::read_otf(path);
  } catch (const data::OtfError& e) {
    throw CheckpointError(e.what());
  }
  if (tensors.empty() || tensors[0].name != kConfigTensorName) {
    throw CheckpointError(path.string() + ": missing " + kConfigTensorName + " header tensor");
  }
  Checkpoint ck;
  try {
    ck.config = model_config_from_json(nlohmann::json::parse(tensor_text(tensors[0].value)));
  } catch (const std::exception& e) {
    throw CheckpointError(path.string() + ": invalid model config header: " + e.what());
  }
  std::unordered_map<std::string, const Tensor<float>*> by_name;
  for (const auto& t : tensors) by_name[t.name] = &t.value;
  auto check_layout = [&](const std::vector<blocks::ParamSpec>& layout) {
    for (const auto& spec : layout) {
      auto it = by_name.find(spec.name);
      if (it == by_name.end()) throw CheckpointError(path.string() + ": missing tensor " + spec.name);
      if (it->second->shape() != spec.shape) {
        throw CheckpointError(path.string() + ": tensor " + spec.name + " has shape " +
                              shape_str(it->second->shape()) + ", config requires " + shape_str(spec.shape));
      }
    }
  };
  if (expected) {
    check_layout(parameter_layout(*expected));
    if (!(*expected == ck.config)) {
      throw CheckpointError(path.string() + ": model config in checkpoint differs from the run config");
    }
  }
  const auto layout = parameter_layout(ck.config);
  check_layout(layout);
  for (const auto& spec : layout) ck.params.add(spec.name, *by_name.at(spec.name));
  if (auto it = by_name.find("optim.step"); it != by_name.end()) {
    train::AdamState<float> st = train::AdamState<float>::zeros(ck.params, adam);
    st.step = static_cast<std::int64_t>(it->second->operator[](0));
    for (std::size_t i = 0; i < layout.size(); ++i) {
      for (auto [prefix, dst] : {std::pair{"optim.m.", &st.m[i]}, std::pair{"optim.v.", &st.v[i]}}) {
        auto jt = by_name.find(prefix + layout[i].name);
        if (jt == by_name.end()) throw CheckpointError(std::string("checkpoint is missing tensor ") + prefix + layout[i].name);
        if (jt->second->shape() != layout[i].shape) {
          throw CheckpointError("tensor " + jt->first + " has shape " + shape_str(jt->second->shape()));
        }
        *dst = *jt->second;
      }
    }
    ck.optimizer = std::move(st);
  }
  return ck;
}

}  // namespace omega
