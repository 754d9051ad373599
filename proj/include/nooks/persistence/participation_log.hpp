#pragma once

#include <string>

#include "nooks/persistence/state.hpp"

namespace nooks {

/// Renders the research export: one record per nook, fields as `key: value`
/// lines, records separated by a line holding only `%%`. Id lists are
/// comma-separated. Backslashes and newlines in values are escaped as `\\`
/// and `\n`. Member demographics are appended only when requested.
///
///   nook: nk-0001
///   origin: member
///   topic: ...
///   details: ...
///   channel_title: ...
///   creator: alice
///   interested: bob,carol
///   not_interested: dave
///   members: alice,bob,carol
///   state: Archived
///   created_at / batch_date / activated_at / archived_at
std::string export_participation_log(const WorkspaceState& state, bool include_demographics = false);

}  // namespace nooks
