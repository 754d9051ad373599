#include <gtest/gtest.h>

#include "nooks/platform/localchat.hpp"
#include "support.hpp"

namespace nooks {
namespace {

using testing::utc;
using testing::ymd;

class LocalChatTest : public ::testing::Test {
 protected:
  LocalChatTest() : clock(utc(ymd(2024, 3, 4), 9)), chat(clock) {
    for (const char* u : {"a", "b", "c", "d"}) chat.add_user(UserId(u), std::string("User ") + u);
  }

  ErrorCode code_of(const std::function<void()>& f) {
    try {
      f();
    } catch (const NooksError& e) {
      return e.code();
    }
    ADD_FAILURE() << "expected an error";
    return ErrorCode::ParseError;
  }

  VirtualClock clock;
  LocalChat chat;
  const UserId a{"a"}, b{"b"}, c{"c"}, d{"d"};
};

TEST_F(LocalChatTest, PrivateChannelsAreMembersOnly) {
  auto ref = chat.create_private_channel("books", {a, b}, "k1");
  EXPECT_TRUE(ref.is_private);
  EXPECT_EQ(chat.members_of(ref.handle), (UserSet{a, b}));
  chat.post_message(ref, a, "hello");
  EXPECT_EQ(chat.messages(ref, b).size(), 1u);
  EXPECT_EQ(code_of([&] { chat.messages(ref, c); }), ErrorCode::NotAMember);
  EXPECT_EQ(code_of([&] { chat.post_message(ref, c, "hi"); }), ErrorCode::NotAMember);
}

TEST_F(LocalChatTest, NameCollisionsGetSuffixes) {
  auto first = chat.create_private_channel("books", {a, b}, "k1");
  auto second = chat.create_private_channel("books", {a, c}, "k2");
  auto third = chat.create_private_channel("books", {a, d}, "k3");
  EXPECT_EQ(first.name, "books");
  EXPECT_EQ(second.name, "books-2");
  EXPECT_EQ(third.name, "books-3");
}

TEST_F(LocalChatTest, DedupeKeysMakeCallsIdempotent) {
  auto first = chat.create_private_channel("books", {a, b}, "same");
  auto again = chat.create_private_channel("books", {a, b}, "same");
  EXPECT_EQ(first, again);
  EXPECT_EQ(chat.private_channel_count(), 1u);

  chat.post_as_bot(first, "greeting", "g");
  chat.post_as_bot(first, "greeting", "g");
  EXPECT_EQ(chat.messages(first, a).size(), 1u);

  chat.send_direct(a, "note", "n1");
  chat.send_direct(a, "note", "n1");
  chat.send_direct(b, "note", "n1");  // keys are per recipient
  EXPECT_EQ(chat.inbox(a).size(), 1u);
  EXPECT_EQ(chat.inbox(b).size(), 1u);
}

TEST_F(LocalChatTest, ArchiveLifecycle) {
  auto ref = chat.create_private_channel("books", {a, b}, "k");
  auto archived = chat.archive(ref);
  EXPECT_FALSE(archived.writable);
  EXPECT_EQ(code_of([&] { chat.post_message(ref, a, "late"); }), ErrorCode::ChannelArchived);
  EXPECT_EQ(code_of([&] { chat.archive(ref); }), ErrorCode::AlreadyArchived);
  EXPECT_EQ(code_of([&] { chat.unarchive(ref, c); }), ErrorCode::NotAMember);
  EXPECT_TRUE(chat.unarchive(ref, b).writable);
  EXPECT_EQ(code_of([&] { chat.unarchive(ref, b); }), ErrorCode::AlreadyActive);
  EXPECT_NO_THROW(chat.post_message(ref, a, "back"));
}

TEST_F(LocalChatTest, AddMemberRules) {
  auto ref = chat.create_private_channel("books", {a, b}, "k");
  EXPECT_EQ(chat.add_member(ref, a, c), (UserSet{a, b, c}));
  EXPECT_EQ(code_of([&] { chat.add_member(ref, a, c); }), ErrorCode::AlreadyMember);
  EXPECT_EQ(code_of([&] { chat.add_member(ref, d, a); }), ErrorCode::NotAMember);
  EXPECT_EQ(code_of([&] { chat.add_member(ref, a, UserId("ghost")); }), ErrorCode::UnknownUser);
}

TEST_F(LocalChatTest, RejectsEmptyOrUnknownMembers) {
  EXPECT_EQ(code_of([&] { chat.create_private_channel("x", {}, "k"); }), ErrorCode::EmptyMemberSet);
  EXPECT_EQ(code_of([&] { chat.create_private_channel("x", {a, UserId("ghost")}, "k"); }), ErrorCode::UnknownUser);
}

TEST_F(LocalChatTest, InjectedFailuresAreTransient) {
  chat.fail_next(1);
  EXPECT_EQ(code_of([&] { chat.create_private_channel("x", {a}, "k"); }), ErrorCode::PlatformFailure);
  EXPECT_NO_THROW(chat.create_private_channel("x", {a}, "k"));
  EXPECT_EQ(chat.private_channel_count(), 1u);
}

TEST_F(LocalChatTest, PublicChannelMembership) {
  chat.add_public_channel("general", {a, b, c});
  EXPECT_EQ(chat.channel_members_by_name("general"), (UserSet{a, b, c}));
  EXPECT_EQ(code_of([&] { chat.channel_members_by_name("nope"); }), ErrorCode::UnknownChannel);
}

TEST_F(LocalChatTest, BackingFileSurvivesRestart) {
  testing::TempDir dir;
  const auto file = dir / "chat.json";
  std::string handle;
  {
    LocalChat first(clock, file);
    first.add_user(a, "A");
    first.add_user(b, "B");
    auto ref = first.create_private_channel("books", {a, b}, "k");
    first.post_message(ref, a, "persisted");
    first.send_direct(b, "dm", "dm-1");
    handle = ref.handle;
  }
  LocalChat second(clock, file);
  EXPECT_TRUE(second.has_user(a));
  auto ref = second.find_channel(handle);
  ASSERT_TRUE(ref.has_value());
  EXPECT_EQ(second.messages(*ref, b).at(0).body, "persisted");
  second.send_direct(b, "dm", "dm-1");  // dedupe state persisted too
  EXPECT_EQ(second.inbox(b).size(), 1u);
  EXPECT_EQ(second.create_private_channel("books", {a, b}, "k").handle, handle);
}

}  // namespace
}  // namespace nooks
