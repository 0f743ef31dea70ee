#!/usr/bin/env python3
"""Hydrate a tweet-ID list into the JSON-lines schema aggstream reads.

Datasets of labeled tweets are usually distributed as (tweet_id, label)
pairs; the text and author profile must be fetched from the platform API
with your own credentials. This stub shows the expected output schema and
where to plug in the fetch call.

Usage: hydrate_tweets.py ids.tsv > data/external/founta_86k.jsonl
       (ids.tsv: one "tweet_id<TAB>label" pair per line)
"""
import json
import sys


def fetch_tweet(tweet_id: str):
    # Plug a platform API client in here. It must return the tweet text,
    # creation time, and the five author profile fields below.
    raise NotImplementedError(
        "fetching requires platform API credentials; see the README"
    )


def main() -> int:
    if len(sys.argv) != 2:
        print(__doc__, file=sys.stderr)
        return 1
    for line in open(sys.argv[1], encoding="utf-8"):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tweet_id, label = line.split("\t")
        tweet = fetch_tweet(tweet_id)
        record = {
            "id": tweet_id,
            "text": tweet["text"],
            "created_at": tweet["created_at"],
            "label": label,
            "user": {
                "created_at": tweet["user"]["created_at"],
                "statuses_count": tweet["user"]["statuses_count"],
                "listed_count": tweet["user"]["listed_count"],
                "followers_count": tweet["user"]["followers_count"],
                "friends_count": tweet["user"]["friends_count"],
            },
        }
        print(json.dumps(record))
    return 0


if __name__ == "__main__":
    sys.exit(main())
