#include "attachnet/mime.hpp"

#include "attachnet/archive.hpp"
#include "attachnet/errors.hpp"
#include "attachnet/sha1.hpp"

#include <doctest.h>
#include <openssl/evp.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

using namespace attachnet;

namespace {

std::string openssl_sha1_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha1(), nullptr);
    static const char* hexd = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hexd[digest[i] >> 4]);
        out.push_back(hexd[digest[i] & 0xF]);
    }
    return out;
}

std::string image_bytes(std::size_t n, unsigned seed = 5) {
    std::string bytes(n, '\0');
    std::mt19937_64 rng(seed);
    for (char& c : bytes)
        c = static_cast<char>(rng() & 0xFF);
    return bytes;
}

std::string multipart_with_image(const std::string& bytes, std::size_t wrap = 60) {
    std::string raw = "Message-ID: <img1@test>\n"
                      "From: alice@corp.test\n"
                      "To: bob@corp.test\n"
                      "Subject: picture\n"
                      "Date: Tue, 1 May 2001 10:00:00 -0500\n"
                      "MIME-Version: 1.0\n"
                      "Content-Type: multipart/mixed; boundary=\"XYZ\"\n"
                      "\n"
                      "--XYZ\n"
                      "Content-Type: text/plain\n"
                      "\n"
                      "see attached\n"
                      "--XYZ\n"
                      "Content-Type: image/jpeg; name=\"party.jpg\"\n"
                      "Content-Transfer-Encoding: base64\n"
                      "Content-Disposition: attachment; filename=\"party.jpg\"\n"
                      "\n";
    raw += encode_base64(bytes, wrap);
    raw += "--XYZ--\n";
    return raw;
}

} // namespace

TEST_CASE("normalize_body removes whitespace") {
    CHECK(normalize_body("a b\nc") == "abc");
    CHECK(normalize_body("") == "");
    CHECK(normalize_body("\t \r\n") == "");
}

TEST_CASE("normalize_body maps quoted-printable escapes to one '?'") {
    CHECK(normalize_body("x=20=20y") == "x?y");
    CHECK(normalize_body("a=\nb") == "a?b");     // soft break
    CHECK(normalize_body("a=\r\nb") == "a?b");
    CHECK(normalize_body("??a???b") == "?a?b");  // runs collapse
    CHECK(normalize_body("100% = fine") == "100%=fine"); // bare '=' stays
}

TEST_CASE("normalize_body is idempotent on generated strings") {
    std::mt19937_64 rng(13);
    const std::string alphabet = "ab =?\n\r\t0129ABf=020=3D";
    for (int i = 0; i < 2000; ++i) {
        std::string s;
        std::size_t len = rng() % 40;
        for (std::size_t j = 0; j < len; ++j)
            s.push_back(alphabet[rng() % alphabet.size()]);
        std::string once = normalize_body(s);
        CHECK(normalize_body(once) == once);
    }
}

TEST_CASE("single part text message has no attachments") {
    std::string raw = "Message-ID: <m1@test>\n"
                      "From: alice@corp.test\n"
                      "To: bob@corp.test\n"
                      "Subject: hello\n"
                      "Date: Tue, 1 May 2001 10:00:00 -0500\n"
                      "\n"
                      "just text\n";
    EmailMessage msg = parse_message(raw, "alice", "inbox");
    CHECK(msg.message_id == "m1@test");
    CHECK(msg.attachments.empty());
    CHECK(msg.body_text == "just text\n");
    CHECK(msg.subject == "hello");
    REQUIRE(msg.sender.has_value());
    CHECK(msg.sender->rendered() == "alice@corp.test");
    REQUIRE(msg.to.size() == 1);
    CHECK(msg.to[0].rendered() == "bob@corp.test");
    CHECK(msg.custodian == "alice");
    CHECK(msg.folder == "inbox");
}

TEST_CASE("multipart image part becomes one attachment with exact size") {
    // byte-level walk of the fixture: the decoded part must be exactly the
    // 2048 bytes that went in, digest checked against a second SHA-1
    std::string bytes = image_bytes(2048);
    EmailMessage msg = parse_message(multipart_with_image(bytes), "alice", "inbox");

    REQUIRE(msg.attachments.size() == 1);
    const AttachmentRecord& att = msg.attachments[0];
    CHECK(att.size_bytes == 2048);
    CHECK(att.media_class == MediaClass::multimedia);
    CHECK(att.mime_type == "image/jpeg");
    REQUIRE(att.filename.has_value());
    CHECK(*att.filename == "party.jpg");
    CHECK(att.digest == openssl_sha1_hex(bytes));
    CHECK(msg.body_text == "see attached");
}

TEST_CASE("attachment digest is invariant under base64 rewrap") {
    std::string bytes = image_bytes(1000, 99);
    EmailMessage narrow = parse_message(multipart_with_image(bytes, 40), "a", "f");
    EmailMessage wide = parse_message(multipart_with_image(bytes, 76), "a", "f");
    REQUIRE(narrow.attachments.size() == 1);
    REQUIRE(wide.attachments.size() == 1);
    CHECK(narrow.attachments[0].digest == wide.attachments[0].digest);
}

TEST_CASE("two identical attachment bodies give equal digests") {
    std::string payload = "identical payload bytes";
    std::string raw = "Message-ID: <m2@test>\n"
                      "From: alice@corp.test\n"
                      "To: bob@corp.test\n"
                      "Content-Type: multipart/mixed; boundary=\"B\"\n"
                      "\n"
                      "--B\n"
                      "Content-Type: application/pdf; name=\"a.pdf\"\n"
                      "Content-Transfer-Encoding: base64\n"
                      "\n" +
                      encode_base64(payload) +
                      "--B\n"
                      "Content-Type: application/pdf; name=\"b.pdf\"\n"
                      "Content-Transfer-Encoding: base64\n"
                      "\n" +
                      encode_base64(payload) + "--B--\n";
    EmailMessage msg = parse_message(raw, "alice", "inbox");
    REQUIRE(msg.attachments.size() == 2);
    CHECK(msg.attachments[0].digest == msg.attachments[1].digest);
    CHECK(msg.attachments[0].media_class == MediaClass::document);
}

TEST_CASE("boundary lines tolerate transport padding") {
    std::string raw = "Message-ID: <pad@test>\n"
                      "From: a@x.com\n"
                      "Content-Type: multipart/mixed; boundary=\"B\"\n"
                      "\n"
                      "--B  \n"
                      "Content-Type: text/plain\n"
                      "\n"
                      "padded body\n"
                      "--B \t\n"
                      "Content-Type: application/pdf; name=\"x.pdf\"\n"
                      "Content-Transfer-Encoding: base64\n"
                      "\n" +
                      encode_base64("pdf bytes") +
                      "--B--   \n";
    EmailMessage msg = parse_message(raw, "a", "f");
    CHECK(msg.body_text == "padded body");
    REQUIRE(msg.attachments.size() == 1);
    CHECK(msg.attachments[0].size_bytes == 9);
}

TEST_CASE("missing separator is unparseable") {
    CHECK_THROWS_AS(parse_message("To: bob@corp.test", "a", "f"), UnparseableMessage);
}

TEST_CASE("unknown transfer encoding skips the part with a warning") {
    std::string raw = "Message-ID: <m3@test>\n"
                      "From: alice@corp.test\n"
                      "Content-Type: multipart/mixed; boundary=\"B\"\n"
                      "\n"
                      "--B\n"
                      "Content-Type: application/pdf; name=\"x.pdf\"\n"
                      "Content-Transfer-Encoding: x-strange\n"
                      "\n"
                      "garbage\n"
                      "--B--\n";
    EmailMessage msg = parse_message(raw, "a", "f");
    CHECK(msg.attachments.empty());
    REQUIRE(msg.warnings.size() == 1);
    CHECK(msg.warnings[0].find("x-strange") != std::string::npos);
}

TEST_CASE("missing message id is synthesized deterministically") {
    std::string raw = "From: alice@corp.test\nTo: bob@corp.test\n\nbody\n";
    EmailMessage one = parse_message(raw, "a", "f");
    EmailMessage two = parse_message(raw, "a", "f");
    CHECK(one.message_id == two.message_id);
    CHECK(one.message_id.rfind("sha1:", 0) == 0);
    CHECK(one.message_id.size() == 45);
}

TEST_CASE("quoted-printable bodies decode") {
    std::string raw = "Message-ID: <qp@test>\n"
                      "From: a@x.com\n"
                      "Content-Type: text/plain\n"
                      "Content-Transfer-Encoding: quoted-printable\n"
                      "\n"
                      "caf=C3=A9 and a soft=\nbreak\n";
    EmailMessage msg = parse_message(raw, "a", "f");
    CHECK(msg.body_text == "caf\xC3\xA9 and a softbreak\n");
}

TEST_CASE("recipient lists are deduplicated per header") {
    std::string raw = "Message-ID: <dup@test>\n"
                      "From: a@x.com\n"
                      "To: b@x.com, B@X.COM, c@x.com\n"
                      "Cc: b@x.com\n"
                      "\n"
                      "hi\n";
    EmailMessage msg = parse_message(raw, "a", "f");
    CHECK(msg.to.size() == 2);
    CHECK(msg.cc.size() == 1);
    CHECK(msg.recipients().size() == 2); // to ∪ cc
}

TEST_CASE("media class partition is total") {
    const char* types[] = {"image/png", "audio/mp3",  "video/avi",      "application/pdf",
                           "text/plain", "text/html", "application/zip", "message/rfc822",
                           "",           "weird",      "application/octet-stream"};
    for (const char* t : types) {
        for (bool has_filename : {false, true}) {
            MediaClass c = media_class_for(t, has_filename);
            bool is_doc = c == MediaClass::document;
            bool is_media = c == MediaClass::multimedia;
            bool is_other = c == MediaClass::other;
            CHECK((int(is_doc) + int(is_media) + int(is_other)) == 1);
        }
    }
    CHECK(media_class_for("text/plain", true) == MediaClass::document);
    CHECK(media_class_for("text/plain", false) == MediaClass::other);
    CHECK(media_class_for("IMAGE/JPEG", false) == MediaClass::multimedia);
}

TEST_CASE("mbox archives load, one custodian per file") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "attachnet_mbox_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "alice.mbox");
        f << "From alice@corp.test Tue May  1 10:00:00 2001\n"
             "Message-ID: <mb1@test>\n"
             "From: alice@corp.test\n"
             "To: bob@corp.test\n"
             "Subject: one\n"
             "\n"
             "first body\n"
             ">From here this is still the first body\n"
             "From alice@corp.test Tue May  1 11:00:00 2001\n"
             "Message-ID: <mb2@test>\n"
             "From: alice@corp.test\n"
             "To: carol@corp.test\n"
             "Subject: two\n"
             "\n"
             "second body\n";
    }

    LoadReport single = load_mbox(dir / "alice.mbox");
    REQUIRE(single.archives.size() == 1);
    CHECK(single.archives[0].custodian == "alice");
    REQUIRE(single.archives[0].messages.size() == 2);
    CHECK(single.archives[0].messages[0].body_text.find("still the first body") !=
          std::string::npos);

    // the same file discovered inside an archives directory
    LoadReport tree = load_eml_tree(dir);
    REQUIRE(tree.archives.size() == 1);
    CHECK(tree.message_count == 2);
}

TEST_CASE("random noise with a separator parses without crashing") {
    std::mt19937_64 rng(149);
    const std::string alphabet = "abZ:@<>. \"=-\r\n_;/";
    for (int trial = 0; trial < 1500; ++trial) {
        std::string raw;
        std::size_t len = rng() % 120;
        for (std::size_t i = 0; i < len; ++i)
            raw.push_back(alphabet[rng() % alphabet.size()]);
        raw += "\n\nbody\n"; // always a separator somewhere
        EmailMessage msg = parse_message(raw, "c", "f");
        CHECK_FALSE(msg.message_id.empty());
        for (const auto& att : msg.attachments)
            CHECK(att.digest.size() == 40);
        // deterministic on re-parse
        EmailMessage again = parse_message(raw, "c", "f");
        CHECK(again.message_id == msg.message_id);
        CHECK(again.body_digest() == msg.body_digest());
    }
}

TEST_CASE("parse, serialize, parse keeps the structured fields") {
    std::string bytes = image_bytes(700, 42);
    ParseOptions keep;
    keep.keep_attachment_bytes = true;
    EmailMessage original = parse_message(multipart_with_image(bytes), "alice", "inbox", keep);

    EmailMessage reparsed = parse_message(to_eml(original), "alice", "inbox", keep);
    CHECK(reparsed.message_id == original.message_id);
    REQUIRE(reparsed.sender.has_value());
    CHECK(reparsed.sender->rendered() == original.sender->rendered());
    CHECK(reparsed.to.size() == original.to.size());
    CHECK(reparsed.body_digest() == original.body_digest());
    REQUIRE(reparsed.attachments.size() == original.attachments.size());
    CHECK(reparsed.attachments[0].digest == original.attachments[0].digest);
    CHECK(reparsed.attachments[0].size_bytes == original.attachments[0].size_bytes);

    // and once more, now from the serialized form
    EmailMessage third = parse_message(to_eml(reparsed), "alice", "inbox", keep);
    CHECK(third.message_id == reparsed.message_id);
    CHECK(third.attachments[0].digest == reparsed.attachments[0].digest);
}
