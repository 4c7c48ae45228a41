#include <gtest/gtest.h>

#include "teleop/core/error.hpp"
#include "teleop/msgbus/topic.hpp"
#include "topic_oracle.hpp"

using namespace teleop;
using namespace teleop::msgbus;

TEST(Topic, Examples) {
  EXPECT_TRUE(match_topic(TopicFilter::parse("arm/+/cmd"), "arm/7/cmd"));
  EXPECT_TRUE(match_topic(TopicFilter::parse("arm/#"), "arm/7/ack"));
  EXPECT_FALSE(match_topic(TopicFilter::parse("arm/+/cmd"), "arm/7/ack"));
  EXPECT_TRUE(match_topic(TopicFilter::parse("arm/#"), "arm"));
  EXPECT_TRUE(match_topic(TopicFilter::parse("#"), "x/y/z"));
  EXPECT_FALSE(match_topic(TopicFilter::parse("+"), "x/y"));
  EXPECT_TRUE(match_topic(TopicFilter::parse("+/+"), "/x"));
}

TEST(Topic, MalformedFiltersRejected) {
  for (const char* bad : {"", "a/#/b", "#/a", "a/b#", "a+/b", "++"}) {
    try {
      TopicFilter::parse(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::invalid_filter) << bad;
    }
  }
  EXPECT_THROW(TopicFilter::parse(std::string("a\0", 2)), Error);
}

TEST(Topic, PublishTopicValidity) {
  EXPECT_TRUE(is_valid_publish_topic("arm/1/cmd"));
  EXPECT_FALSE(is_valid_publish_topic(""));
  EXPECT_FALSE(is_valid_publish_topic("arm/+"));
  EXPECT_FALSE(is_valid_publish_topic("arm/#"));
  EXPECT_FALSE(is_valid_publish_topic(std::string("a\0", 2)));
}

TEST(Topic, MatchesBruteForceOracle) {
  auto rep = oracle::check_topic_matcher();
  EXPECT_TRUE(rep.mismatches.empty()) << (rep.mismatches.empty() ? "" : rep.mismatches.front());
  EXPECT_GT(rep.checked, 4000);
  EXPECT_GT(rep.malformed_rejected, 0);
}
