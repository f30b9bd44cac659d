import sys

from optpwm.cli import main

sys.exit(main())
