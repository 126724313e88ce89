#include "memeconf/vocabulary.hpp"

namespace memeconf {

namespace {

constexpr std::array<std::string_view, kVocabularySize> kWords = {
    "love", "the", "way", "you", "smell", "today", "look", "how", "many", "people",
    "when", "your", "friend", "says", "they", "are", "going", "to", "make", "dinner",
    "me", "at", "party", "every", "time", "i", "see", "this", "dog", "cat",
    "just", "want", "some", "coffee", "monday", "morning", "weekend", "vibes", "mom", "dad",
    "school", "work", "boss", "meeting", "again", "never", "always", "best", "worst", "day",
    "night", "sleep", "dream", "big", "small", "happy", "sad", "angry", "funny", "weird",
    "goat", "skunk", "tumbleweed", "desert", "river", "ocean", "mountain", "city", "village", "farm",
    "bread", "cheese", "pizza", "burger", "salad", "soup", "cake", "cookie", "apple", "banana",
    "car", "bus", "train", "plane", "bike", "road", "bridge", "house", "garden", "kitchen",
    "phone", "computer", "screen", "game", "music", "dance", "song", "movie", "book", "story",
    "red", "blue", "green", "yellow", "black", "white", "bright", "dark", "old", "new",
    "run", "walk", "jump", "swim", "fly", "drive", "cook", "eat", "drink", "sing",
    "we", "them", "our", "their", "his", "her", "who", "what", "where", "why",
    "yes", "no", "maybe", "not", "only", "also", "very", "too", "so", "much",
    "one", "two", "three", "four", "five", "ten", "hundred", "first", "last", "next",
    "winter", "summer", "spring", "autumn", "rain", "snow", "sun", "moon", "star", "cloud",
    "teacher", "doctor", "farmer", "driver", "singer", "player", "neighbor", "cousin", "baby", "grandma",
    "shirt", "shoes", "hat", "glasses", "bag", "box", "door", "window", "chair", "table",
    "happen", "forget", "remember", "believe", "think", "know", "feel", "hear", "watch", "wait",
    "finally", "suddenly", "quietly", "loudly", "slowly", "quickly", "together", "alone", "home", "outside",
};

} // namespace

std::span<const std::string_view> vocabulary() noexcept
{
    return kWords;
}

} // namespace memeconf
