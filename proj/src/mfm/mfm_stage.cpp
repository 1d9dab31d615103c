// SPDX-License-Identifier: Apache-2.0

#include "stone_needle/mfm/mfm_stage.hpp"

#include <stdexcept>

#include "stone_needle/error.hpp"
#include "stone_needle/mfm/adapter.hpp"

namespace stone_needle::mfm {

std::string_view to_string(OutputKind kind) noexcept {
  switch (kind) {
    case OutputKind::TextResult: return "text";
    case OutputKind::ResourceResult: return "resources";
    case OutputKind::Empty: return "empty";
  }
  return "empty";
}

namespace {

std::vector<Resource> accepted_only(const std::vector<Resource>& resources, ModalitySet accepted) {
  std::vector<Resource> out;
  for (const auto& r : resources)
    if (accepted.contains(r.modality)) out.push_back(r);
  return out;
}

}  // namespace

ResolvedResources resolve_resources(const Query& query, const DialogueHistory& history,
                                    ModalitySet accepted) {
  if (accepted.empty()) throw std::invalid_argument("resolve_resources: empty accepted set");

  ResolvedResources out;
  out.resources = accepted_only(query.resources, accepted);
  if (!out.resources.empty()) return out;

  for (auto it = history.turns.rbegin(); it != history.turns.rend(); ++it) {
    auto found = accepted_only(it->query.resources, accepted);
    if (!found.empty()) {
      out.resources = std::move(found);
      out.fallback_turn_index = it->index;
      break;
    }
  }
  return out;
}

MfmOutput dispatch(const ModelDescriptor& descriptor, const std::vector<Resource>& resources,
                   const std::optional<std::string>& query_text, ResourceStore& store) {
  AdapterRequest request;
  request.model_id = descriptor.id;
  request.text = query_text;
  for (const auto& r : resources) {
    if (!descriptor.accepted_modalities.contains(r.modality))
      throw std::invalid_argument("dispatch: resource " + r.id + " has a modality model '" +
                                  descriptor.id + "' does not accept");
    request.resources.push_back({r, store.read(r.id)});
  }

  auto adapter = make_adapter(descriptor.endpoint);
  auto started = std::chrono::steady_clock::now();
  auto reply = adapter->invoke(request, descriptor.timeout);
  if (std::chrono::steady_clock::now() - started > descriptor.timeout)
    throw Error(ErrorCode::AdapterTimeout, "adapter '" + descriptor.id + "' exceeded " +
                                               std::to_string(descriptor.timeout.count()) + " ms");

  MfmOutput out;
  out.source_model = descriptor.id;
  if (reply.text) {
    if (reply.text->empty())
      throw Error(ErrorCode::AdapterProtocolError, "adapter '" + descriptor.id + "' sent empty text");
    out.kind = OutputKind::TextResult;
    out.text = std::move(reply.text);
    return out;
  }
  if (reply.artifacts.empty())
    throw Error(ErrorCode::AdapterProtocolError, "adapter '" + descriptor.id + "' sent nothing");

  out.kind = OutputKind::ResourceResult;
  for (const auto& a : reply.artifacts) {
    Resource r;
    try {
      r = store.put(a.bytes, a.media_type, ResourceOrigin::ModelProduced);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::UnsupportedMediaType || e.code() == ErrorCode::EmptyPayload)
        throw Error(ErrorCode::AdapterProtocolError, "adapter '" + descriptor.id + "': " + e.what());
      throw;
    }
    // The blob may predate this turn as an upload; this reference is still model output.
    r.origin = ResourceOrigin::ModelProduced;
    r.media_type = a.media_type;
    out.resources.push_back(std::move(r));
  }
  return out;
}

MfmOutput run_mfm_stage(const Selection& selected, const Query& query,
                        const DialogueHistory& history, const ModelRegistry& registry,
                        ResourceStore& store) {
  if (!selected) return MfmOutput{};

  const auto* descriptor = registry.find(*selected);
  if (!descriptor) throw Error(ErrorCode::UnknownModel, "model '" + *selected + "' is not registered");

  auto resolved = resolve_resources(query, history, descriptor->accepted_modalities);
  if (resolved.resources.empty() && !descriptor->accepted_modalities.contains(Modality::Text)) {
    MfmOutput out;
    out.source_model = descriptor->id;
    out.note = "no compatible resource";
    return out;
  }

  auto out = dispatch(*descriptor, resolved.resources, query.text, store);
  out.fallback_turn_index = resolved.fallback_turn_index;
  return out;
}

std::string describe_produced(const MfmOutput& output) {
  std::string out;
  for (const auto& r : output.resources) {
    if (!out.empty()) out += '\n';
    out += "model " + output.source_model.value_or("none") + " produced " +
           std::string(to_string(r.modality)) + " resource " + r.id;
  }
  return out;
}

}  // namespace stone_needle::mfm
