import sys

from sepscope.cli import main

sys.exit(main())
