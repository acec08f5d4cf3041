# Copyright 2026 The mwetag Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Multiword-expression tagging toolkit.

Labels are strings over "BIO", one character per token.
"""

import json

from ._mwetag import (
    Corpus,
    EmbeddingFile,
    Error,
    ParseError,
    Sentence,
    SentenceEmbeddings,
    TaggerModel,
    Token,
    TrainConfig,
    corpus_stats,
    crf_log_partition,
    crf_marginals,
    crf_nll,
    crf_viterbi,
    evaluate_spans,
    exclude_sentences,
    load_model,
    load_model_bytes,
    normalize_tag,
    parse_dimsum,
    parse_dimsum_file,
    read_embeddings,
    spans_to_tags,
    tags_to_spans,
    train_bilstm_crf,
    train_linear_head,
    validate_tags,
    write_dimsum,
    write_embeddings,
)
from ._mwetag import evaluate_tokens_json as _evaluate_tokens_json


def evaluate_tokens(gold, predicted):
    """Token-level report as a dict (per_class, weighted, macro_f1, ...)."""
    return json.loads(_evaluate_tokens_json(list(gold), list(predicted)))


__all__ = [name for name in dir() if not name.startswith("_")]
