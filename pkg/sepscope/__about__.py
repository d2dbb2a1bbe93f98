# SPDX-FileCopyrightText: 2023-present Makedonsky <mashianov@gmail.com>
#
# SPDX-License-Identifier: MIT
__version__ = '1.0.0'
